import pandas as pd

from core.output_generator import OutputGenerator, hasse_to_dot
from core.stats import RankResult


def test_dot_escapes_language_names():
    result = RankResult(
        languages=['a"b', "c\\d"],
        means={'a"b': 0.5, "c\\d": 0.25},
        arcs=[('a"b', "c\\d")],
        reduced_arcs=[('a"b', "c\\d")],
    )
    dot = hasse_to_dot(result)
    assert '  "a\\"b" [label="a\\"b\\n⟨Ω⟩=0.5000"];' in dot
    assert '  "c\\\\d" [label="c\\\\d\\n⟨Ω⟩=0.2500"];' in dot
    assert '  "a\\"b" -> "c\\\\d";' in dot
    assert dot.startswith('digraph "hasse" {\n')


def test_markdown_summary(tmp_path):
    output = OutputGenerator(tmp_path)
    text = output.format_for_export({
        "title": "Run",
        "facts": {"Languages": 2},
        "tables": {"means": pd.DataFrame({"language": ["en"], "mean": [0.5]})},
        "notes": ["seed 7"],
    })
    assert text.startswith("# Run\n")
    assert "- **Languages:** 2" in text
    assert "| en | 0.5000 |" in text
    assert text.endswith("- seed 7\n")
