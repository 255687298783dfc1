"""Command-line entry point.

Exit codes: 0 success, 1 partial success, 2 input or argument error,
3 session or transport error. Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .context import UserStory, parse_triples_csv, stats, flatten_pairs
from .errors import ArgumentError, ConfigurationError, ParseError, SessionError, StoryvarError
from .implications import format_implications, mine_implications, parse_implications
from .rules import close

log = logging.getLogger("storyvar")

EXIT_OK, EXIT_PARTIAL, EXIT_INPUT, EXIT_SESSION = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(path, text: str) -> None:
    if text and not text.endswith("\n"):
        text += "\n"
    Path(path).write_text(text, encoding="utf-8")


def cmd_stats(args) -> int:
    ctx = parse_triples_csv(_read(args.csv))
    print("\n".join(stats(ctx).lines()))
    return EXIT_OK


def cmd_implications(args) -> int:
    ctx = parse_triples_csv(_read(args.csv))
    imps = mine_implications(
        flatten_pairs(ctx), args.min_support, skip_universal_conclusions=args.minimal
    )
    text = format_implications(imps)
    if args.out:
        _write(args.out, text)
        print(f"implications: {len(imps)}")
    else:
        sys.stdout.write(text)
        print(f"implications: {len(imps)}", file=sys.stderr)
    return EXIT_OK


def _seed(args) -> list[UserStory]:
    items = list(args.pairs)
    if args.seed:
        items.extend(l for l in _read(args.seed).splitlines() if l.strip())
    try:
        return [UserStory.parse(s) for s in items]
    except ArgumentError as exc:
        raise ParseError(str(exc)) from None


def cmd_close(args) -> int:
    imps = parse_implications(_read(args.implications))
    result = close(_seed(args), imps)
    applied = format_implications(result.applied)
    derived = "".join(f"{s}\n" for s in sorted(result.derived))
    sys.stdout.write(f"applied: {len(result.applied)}\n{applied}derived: {len(result.derived)}\n{derived}")
    if args.out:
        _write(args.out, derived)
    return EXIT_OK


def _interactive_selector(options):
    print("Design options:", file=sys.stderr)
    for i, opt in enumerate(options, start=1):
        print(f"  {i}. {opt.name}", file=sys.stderr)
    print("Select options (numbers or names, comma separated): ", end="", file=sys.stderr, flush=True)
    line = sys.stdin.readline()
    chosen = []
    for part in line.split(","):
        part = part.strip()
        if not part:
            continue
        if part.isdigit() and 1 <= int(part) <= len(options):
            chosen.append(options[int(part) - 1].name)
        else:
            chosen.append(part)
    return chosen


def cmd_run(args) -> int:
    from .pipeline import ConversationTranscript, SessionConfig, load_templates, run_session

    recorded = ConversationTranscript.load(args.replay) if args.replay else None
    if recorded is None and not (args.endpoint and args.model):
        raise ArgumentError("live mode needs --endpoint and --model (or use --replay)")
    if recorded is None and not os.environ.get(args.credential_env):
        raise ConfigurationError(f"credential variable {args.credential_env} is not set")
    out = args.out or (None if recorded is not None else f"transcript-{args.id or 'session'}.json")
    config = SessionConfig(
        user_stories_csv=_read(args.csv),
        implications_text=_read(args.implications),
        endpoint=args.endpoint,
        model=args.model,
        credential_env=args.credential_env,
        temperature=args.temperature,
        selection=args.select,
        record_path=Path(out) if out else None,
        replay=recorded,
        conversation_id=args.id,
        label=args.label,
    )
    selector = None
    if args.select is None and recorded is None:
        selector = _interactive_selector
    templates = load_templates(args.templates) if args.templates else None
    try:
        t = run_session(config, templates, selector)
    except SessionError as exc:
        print(f"error: session failed at {exc}", file=sys.stderr)
        if out:
            print(f"partial transcript: {out}", file=sys.stderr)
        return EXIT_SESSION
    print(f"step2: {len(t.parsed.step2)}")
    print(f"step3: {len(t.parsed.step3.stories)}")
    print(f"step4: {len(t.parsed.step4)}")
    if out:
        print(f"transcript: {out}", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    from .evaluation import conversation_metrics, emit_report, summary_similarity
    from .pipeline import ConversationTranscript

    paths = sorted(Path(args.transcripts).glob("*.json")) if Path(args.transcripts).is_dir() else []
    if not paths:
        raise InputError(f"no transcript (*.json) in {args.transcripts}")
    imps = parse_implications(_read(args.implications))
    rows, failures, summaries = [], [], []
    for p in paths:
        try:
            t = ConversationTranscript.load(p)
            rows.append(conversation_metrics(t, imps))
        except (StoryvarError, OSError) as exc:
            print(f"warning: {p.name}: {exc}", file=sys.stderr)
            failures.append((p.stem, str(exc)))
            continue
        if t.parsed.step1:
            summaries.append(t.parsed.step1)
    sim = summary_similarity(summaries) if summaries else None
    report = emit_report(rows, sim, args.format, failures)
    if args.out:
        _write(args.out, report)
    else:
        sys.stdout.write(report)
    if args.figures:
        from .plotting import plot_metrics, plot_option_counts

        fig_dir = Path(args.figures)
        fig_dir.mkdir(parents=True, exist_ok=True)
        if rows:
            plot_metrics(rows, fig_dir / "metrics.png")
        if sim is not None:
            plot_option_counts(sim, fig_dir / "option_counts.png")
    return EXIT_PARTIAL if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="storyvar", description="Mine user-story variability, close seed sets, run and evaluate LLM sessions.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="count systems, roles, features, triples and user stories")
    p.add_argument("csv")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("implications", help="mine implications between (role;feature) pairs")
    p.add_argument("csv")
    p.add_argument("--out", help="implication file to write (default: stdout)")
    p.add_argument("--min-support", type=int, default=1)
    p.add_argument(
        "--minimal", action="store_true",
        help="do not repeat conclusions held by every system under a premise",
    )
    p.set_defaults(func=cmd_implications)

    p = sub.add_parser("close", help="apply implications to a seed set of user stories")
    p.add_argument("implications")
    p.add_argument("pairs", nargs="*", help="seed pairs such as '(role;feature)'")
    p.add_argument("--seed", help="file with one seed pair per line")
    p.add_argument("--out", help="write the derived stories to this file")
    p.set_defaults(func=cmd_close)

    for name in ("run", "replay"):
        p = sub.add_parser(name, help="run the four-step conversation" if name == "run" else "replay a transcript")
        p.add_argument("--csv", required=True, help="user-story CSV embedded in step 1")
        p.add_argument("--implications", required=True, help="implication file embedded in step 3")
        mode = p.add_mutually_exclusive_group(required=name == "replay")
        mode.add_argument("--replay", help="recorded transcript to replay instead of calling the endpoint")
        mode.add_argument("--endpoint", help="OpenAI-compatible base URL")
        p.add_argument("--model")
        p.add_argument("--credential-env", default="OPENAI_API_KEY")
        p.add_argument("--temperature", type=float)
        p.add_argument("--select", action="append", help="design option name (repeatable); default: interactive")
        p.add_argument("--out", help="transcript file to write")
        p.add_argument("--id", help="conversation identifier")
        p.add_argument("--label", help="short label of the selected options")
        p.add_argument("--templates", help="directory with step1.txt .. step4.txt")
        p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="compare transcripts with the rule engine")
    p.add_argument("transcripts", help="directory of transcript JSON files")
    p.add_argument("--implications", required=True)
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.add_argument("--out", help="report file (default: stdout)")
    p.add_argument("--figures", help="directory for PNG figures")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        return args.func(args)
    except (InputError, ParseError, ArgumentError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StoryvarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SESSION


if __name__ == "__main__":
    sys.exit(main())
