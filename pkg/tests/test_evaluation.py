import pytest
from hypothesis import given, strategies as st

from storyvar import ParseError
from storyvar.errors import ArgumentError
from storyvar.evaluation import (
    CSV_COLUMNS,
    ConversationMetrics,
    conversation_metrics,
    emit_report,
    normalize_option_name,
    overlap_coefficient,
    parse_report_csv,
    similarity_prompt,
    summary_similarity,
)
from storyvar.pipeline import DesignOption

from synth import REPORTED_ROWS, synthetic_conversation


@pytest.mark.parametrize("n", sorted(REPORTED_ROWS))
def test_metrics_reproduce_rows(n):
    row = REPORTED_ROWS[n]
    imps, t = synthetic_conversation(row)
    m = conversation_metrics(t, imps)
    assert m.counts == row.counts
    assert (m.conversation_id, m.date, m.options) == (row.id, row.date, row.label)


def test_metrics_need_parsed_steps():
    imps, t = synthetic_conversation(REPORTED_ROWS[1])
    broken = t.with_(parsed=t.parsed.__class__(step1=t.parsed.step1, step2=t.parsed.step2))
    with pytest.raises(ArgumentError, match="step 3"):
        conversation_metrics(broken, imps)


def test_metrics_invariant():
    with pytest.raises(ArgumentError):
        ConversationMetrics("x", "d", "o", 1, 2, 3, 4, 0, 0, 0, 0, 0, 0)
    with pytest.raises(ArgumentError):
        ConversationMetrics("x", "d", "two\nlines", 1, 0, 0, 0, 0, 0, 0, 0, 0, 0)


def test_metrics_label_whitespace_collapsed():
    imps, t = synthetic_conversation(REPORTED_ROWS[4])
    assert conversation_metrics(t.with_(label="SN /\r\nSI"), imps).options == "SN / SI"


def test_identical_summaries():
    s = ["User Management", "Payments", "Search"]
    report = summary_similarity([s, list(s), list(s)])
    assert [c.frequency for c in report.clusters] == [3, 3, 3]
    assert report.frequent == tuple(s)
    assert report.mean_option_count == 3


def test_related_names_cluster():
    report = summary_similarity([["User Management"], ["Account Management"], ["Payments"]])
    assert report.clusters[0].members == ("User Management", "Account Management")
    assert report.clusters[0].frequency == 2
    assert report.frequent == ("User Management",)
    strict = summary_similarity([["User Management"], ["Account Management"]], threshold=0.6)
    assert len(strict.clusters) == 2


def test_design_options_accepted():
    opt = DesignOption("Payment & Subscription Management", ("r",), ("f",))
    report = summary_similarity([[opt], ["payment, subscription management"]])
    assert len(report.clusters) == 1


def test_no_summaries():
    with pytest.raises(ArgumentError):
        summary_similarity([])


def test_normalize_and_overlap():
    assert normalize_option_name("User  Management!") == ("management", "user")
    assert overlap_coefficient(("a", "b"), ("b",)) == 1.0
    assert overlap_coefficient((), ()) == 1.0
    assert overlap_coefficient(("a",), ()) == 0.0


def test_similarity_prompt_lists_names():
    text = similarity_prompt([["A"], ["B", "C"]])
    assert "Summary 2:\n- B\n- C\n" in text


def _rows(k):
    return [ConversationMetrics(str(i), "11/03", "UIF", 14, 46, 112, 46, 27, 50, 27, 50, 57, 50) for i in range(k)]


def test_csv_report_twenty_rows():
    text = emit_report(_rows(20))
    lines = text.splitlines()
    assert len(lines) == 21
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert parse_report_csv(text) == (_rows(20), [])


def test_csv_failed_rows():
    text = emit_report(_rows(1), failures=[("7", "step 2: no pairs")])
    assert text.splitlines()[-1] == "7" + "," * 12 + ",failed"
    assert parse_report_csv(text) == (_rows(1), ["7"])


@pytest.mark.parametrize("text", ["", "a,b\n", ",".join(CSV_COLUMNS) + "\n1,2\n",
                                  ",".join(CSV_COLUMNS) + "\n" + "x," * 13 + "ok\n"])
def test_csv_malformed(text):
    with pytest.raises(ParseError):
        parse_report_csv(text)


def test_markdown_bold_where_values_differ():
    row = ConversationMetrics("17", "11/03", "TM", 10, 94, 71, 0, 49, 33, 27, 33, 78, 32)
    same = ConversationMetrics("1", "10/31", "T", 6, 36, 36, 36, 25, 25, 25, 25, 37, 25)
    md = emit_report([row, same], format="markdown")
    assert "| 17 | 11/03 | TM | 10 | **94** | **71** | **0** |" in md
    assert "| 1 | 10/31 | T | 6 | 36 | 36 | 36 |" in md
    assert "| 1 | 10/31 | T | 6 | **25** | **37** | **25** |" in md
    assert md.count("## ") == 3


def test_markdown_similarity_and_failures():
    sim = summary_similarity([["A b"], ["A c"]])
    md = emit_report([], sim, format="markdown", failures=[("3", "boom")])
    assert "- 3: boom" in md
    assert "- mean options per summary: 1.00" in md
    assert "| A b | 2 | A b; A c |" in md


def test_unknown_format():
    with pytest.raises(ArgumentError):
        emit_report([], format="xml")


counts = st.integers(0, 500)


@st.composite
def metric_rows(draw):
    def triple():
        x, y = draw(counts), draw(counts)
        return x, y, draw(st.integers(0, min(x, y)))

    return ConversationMetrics(
        draw(st.text("abcXYZ019_-", min_size=1, max_size=6)),
        draw(st.sampled_from(["10/31", "2024-11-02"])),
        # labels may hold separators and quotes
        draw(st.text("aZ9 ,;/\"'&é|-", max_size=12)),
        draw(counts), *triple(), *triple(), *triple(),
    )


@given(st.lists(metric_rows(), max_size=8))
def test_csv_round_trip(rows):
    assert parse_report_csv(emit_report(rows)) == (rows, [])
