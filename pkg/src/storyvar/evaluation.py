"""Per-conversation comparison of LLM answers with the rule engine, and the
step-1 summary similarity study."""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, fields
from typing import Optional, Sequence

from .errors import ArgumentError, ParseError
from .implications import ImplicationSet
from .pipeline.transcript import ConversationTranscript, DesignOption
from .rules import close, diff_implications, diff_stories

__all__ = [
    "ConversationMetrics",
    "SimilarityReport",
    "OptionCluster",
    "conversation_metrics",
    "summary_similarity",
    "emit_report",
    "parse_report_csv",
    "similarity_prompt",
]


@dataclass(frozen=True)
class ConversationMetrics:
    conversation_id: str
    date: str
    options: str
    n_seed: int
    n_imp_rule: int
    n_imp_llm: int
    n_imp_both: int
    n_us_rule: int
    n_us_llm: int
    n_us_both: int
    n_us_step3: int
    n_us_step4: int
    n_us_both34: int

    def __post_init__(self):
        for text in (self.conversation_id, self.date, self.options):
            if "\n" in text or "\r" in text:
                raise ArgumentError(f"line break in report cell {text!r}")
        for lo, a, b in (
            (self.n_imp_both, self.n_imp_rule, self.n_imp_llm),
            (self.n_us_both, self.n_us_rule, self.n_us_llm),
            (self.n_us_both34, self.n_us_step3, self.n_us_step4),
        ):
            if lo > min(a, b):
                raise ArgumentError(f"intersection {lo} exceeds min({a}, {b})")

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(getattr(self, f.name) for f in fields(self)[3:])


def conversation_metrics(t: ConversationTranscript, imps: ImplicationSet) -> ConversationMetrics:
    """Run the rule engine on the step-2 seed and compare with steps 3 and 4."""
    for step in (2, 3, 4):
        if t.parsed.get(step) is None:
            raise ArgumentError(f"transcript {t.id}: parsed step {step} missing")
    seed = t.parsed.step2
    rule = close(seed, imps, warn_unknown=False)
    imp_diff = diff_implications(rule.applied, t.parsed.step3.applied)
    us_diff = diff_stories(rule.derived, t.parsed.step3.stories)
    step_diff = diff_stories(t.parsed.step3.stories, t.parsed.step4)
    return ConversationMetrics(
        conversation_id=t.id,
        date=t.date,
        options=" ".join((t.label or "/".join(t.selection)).split()),
        n_seed=len(seed),
        n_imp_rule=imp_diff.left_total,
        n_imp_llm=imp_diff.right_total,
        n_imp_both=len(imp_diff.both),
        n_us_rule=us_diff.left_total,
        n_us_llm=us_diff.right_total,
        n_us_both=len(us_diff.both),
        n_us_step3=step_diff.left_total,
        n_us_step4=step_diff.right_total,
        n_us_both34=len(step_diff.both),
    )


@dataclass(frozen=True)
class OptionCluster:
    label: str
    members: tuple[str, ...]
    frequency: int  # number of summaries with at least one member


@dataclass(frozen=True)
class SimilarityReport:
    n_summaries: int
    option_counts: tuple[int, ...]
    mean_option_count: float
    clusters: tuple[OptionCluster, ...]
    frequent: tuple[str, ...]  # cluster labels present in more than half the summaries


def normalize_option_name(name: str) -> tuple[str, ...]:
    tokens = re.findall(r"[a-z0-9]+", name.casefold())
    return tuple(sorted(set(tokens)))


def overlap_coefficient(a: Sequence[str], b: Sequence[str]) -> float:
    a, b = set(a), set(b)
    if not a or not b:
        return 1.0 if a == b else 0.0
    return len(a & b) / min(len(a), len(b))


def summary_similarity(
    summaries: Sequence[Sequence[DesignOption | str]], threshold: float = 0.5
) -> SimilarityReport:
    """Group option names across summaries by token overlap.

    Names are lowercased, stripped of punctuation and reduced to sorted token
    sets. Each option joins the first cluster whose founding name has an
    overlap coefficient of at least ``threshold`` with it, else founds a new
    cluster. Clusters are visited in creation order, so the result is
    deterministic for a given summary order.
    """
    if not summaries:
        raise ArgumentError("need at least one summary")
    leaders: list[tuple[str, ...]] = []
    labels: list[str] = []
    members: list[dict[str, None]] = []
    present: list[set[int]] = []
    counts = []
    for i, summary in enumerate(summaries):
        counts.append(len(summary))
        for opt in summary:
            name = opt.name if isinstance(opt, DesignOption) else str(opt)
            tokens = normalize_option_name(name)
            for c, lead in enumerate(leaders):
                if overlap_coefficient(tokens, lead) >= threshold:
                    break
            else:
                c = len(leaders)
                leaders.append(tokens)
                labels.append(name)
                members.append({})
                present.append(set())
            members[c][name] = None
            present[c].add(i)
    n = len(summaries)
    clusters = tuple(
        OptionCluster(labels[c], tuple(members[c]), len(present[c])) for c in range(len(leaders))
    )
    return SimilarityReport(
        n_summaries=n,
        option_counts=tuple(counts),
        mean_option_count=sum(counts) / n,
        clusters=clusters,
        frequent=tuple(cl.label for cl in clusters if cl.frequency > n / 2),
    )


def similarity_prompt(summaries: Sequence[Sequence[DesignOption | str]]) -> str:
    """A prompt asking an LLM to compare the summaries, for the LLM-judged variant."""
    blocks = []
    for i, summary in enumerate(summaries, start=1):
        names = [o.name if isinstance(o, DesignOption) else str(o) for o in summary]
        blocks.append(f"Summary {i}:\n" + "".join(f"- {n}\n" for n in names))
    return (
        "<Context>: The design option summaries below were produced independently for the same "
        "family of websites.\n\n<Summaries>:\n"
        + "\n".join(blocks)
        + "\n<Task>: Report which options are common to the summaries, treating identical names, "
        "synonyms and closely related terms as the same option. List the options present in "
        "more than half of the summaries.\n"
    )


CSV_COLUMNS = [f.name for f in fields(ConversationMetrics)] + ["status"]


def emit_report(
    rows: Sequence[ConversationMetrics],
    sim: Optional[SimilarityReport] = None,
    format: str = "csv",
    failures: Sequence[tuple[str, str]] = (),
) -> str:
    """Render metric rows as CSV or as markdown tables.

    CSV has one header and one line per conversation; ``failures`` (id,
    reason) are appended as rows with status ``failed`` and empty counts.
    The similarity report only appears in the markdown form.
    """
    if format == "csv":
        return _emit_csv(rows, failures)
    if format in ("markdown", "md"):
        return _emit_markdown(rows, sim, failures)
    raise ArgumentError(f"unknown report format {format!r}")


def _emit_csv(rows, failures) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([getattr(r, c) for c in CSV_COLUMNS[:-1]] + ["ok"])
    for ident, _reason in failures:
        w.writerow([ident] + [""] * (len(CSV_COLUMNS) - 2) + ["failed"])
    return buf.getvalue()


def parse_report_csv(text: str) -> tuple[list[ConversationMetrics], list[str]]:
    """Inverse of the CSV report: (rows, ids of failed conversations)."""
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty report") from None
    if header != CSV_COLUMNS:
        raise ParseError("unexpected report header", 1)
    rows, failed = [], []
    for lineno, rec in enumerate(reader, start=2):
        if len(rec) != len(CSV_COLUMNS):
            raise ParseError(f"expected {len(CSV_COLUMNS)} fields", lineno)
        if rec[-1] == "failed":
            failed.append(rec[0])
            continue
        try:
            rows.append(ConversationMetrics(rec[0], rec[1], rec[2], *(int(v) for v in rec[3:-1])))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    return rows, failed


_TABLES = (
    ("Implications applied in step 3", "#imp RuleEng", "#imp LLM", "#imp both", ("n_imp_rule", "n_imp_llm", "n_imp_both")),
    ("User stories computed in step 3", "#US RuleEng", "#US LLM", "#US both", ("n_us_rule", "n_us_llm", "n_us_both")),
    ("User stories listed in steps 3 and 4", "#US step 3", "#US step 4", "#US both", ("n_us_step3", "n_us_step4", "n_us_both34")),
)


def _emit_markdown(rows, sim, failures) -> str:
    out = []
    for title, h1, h2, h3, cols in _TABLES:
        out.append(f"## {title}\n")
        out.append(f"| Conversation | Date | Options | #initial US | {h1} | {h2} | {h3} |")
        out.append("|---|---|---|---:|---:|---:|---:|")
        for r in rows:
            vals = [getattr(r, c) for c in cols]
            differs = not (vals[0] == vals[1] == vals[2])
            cells = [f"**{v}**" if differs else str(v) for v in vals]
            out.append(f"| {r.conversation_id} | {r.date} | {r.options} | {r.n_seed} | " + " | ".join(cells) + " |")
        out.append("")
    if failures:
        out.append("## Failed conversations\n")
        out.extend(f"- {ident}: {reason}" for ident, reason in failures)
        out.append("")
    if sim is not None:
        out.append("## Step-1 summary similarity\n")
        out.append(f"- summaries: {sim.n_summaries}")
        out.append(f"- options per summary: {', '.join(map(str, sim.option_counts))}")
        out.append(f"- mean options per summary: {sim.mean_option_count:.2f}")
        out.append(f"- clusters in more than half of the summaries: {len(sim.frequent)}")
        out.append("")
        out.append("| Cluster | Summaries | Members |")
        out.append("|---|---:|---|")
        for cl in sorted(sim.clusters, key=lambda c: -c.frequency):
            out.append(f"| {cl.label} | {cl.frequency} | {'; '.join(cl.members)} |")
        out.append("")
    return "\n".join(out).rstrip("\n") + "\n"
