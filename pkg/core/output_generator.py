# Omega Engine - Output Generator
# Versioned CSV tables, DOT Hasse diagrams, JSON dumps and a markdown summary

from typing import List, Dict, Any, Optional
from pathlib import Path
import json
import logging

import pandas as pd

from config import SCHEMA_VERSION
from core.stats import RankResult

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def table_header(name: str) -> str:
    return f"# omega-engine {name} v{SCHEMA_VERSION}"


def _dot_string(text: str) -> str:
    """Quoted DOT id; quotes, backslashes and newlines are escaped."""
    return json.dumps(text, ensure_ascii=False)


def hasse_to_dot(result: RankResult, name: str = "hasse", reduced: bool = True) -> str:
    """
    DOT digraph of the ranking, one node per language, one edge per arc.

    Nodes are listed by descending mean, then name; edges in sorted order.
    """
    arcs = result.reduced_arcs if reduced else result.arcs
    lines = [f"digraph {_dot_string(name)} {{", "  rankdir=TB;", "  node [shape=box];"]
    for language in sorted(result.means, key=lambda lang: (-result.means[lang], lang)):
        label = _dot_string(f"{language}\n⟨Ω⟩={result.means[language]:.4f}")
        lines.append(f"  {_dot_string(language)} [label={label}];")
    for high, low in sorted(arcs):
        lines.append(f"  {_dot_string(high)} -> {_dot_string(low)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


class OutputGenerator:
    """
    Writes every artifact of a run into one directory.
    Outputs are byte-deterministic for fixed inputs: fixed columns, sorted rows, "\\n" endings.
    """

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.written: List[Dict[str, Any]] = []

    def _path(self, filename: str) -> Path:
        return self.out_dir / filename

    def _record(self, kind: str, path: Path, rows: Optional[int] = None) -> Path:
        self.written.append({"kind": kind, "path": str(path), "rows": rows})
        logger.info(f"Wrote {path}")
        return path

    def write_table(self, name: str, frame: pd.DataFrame, columns: Optional[List[str]] = None) -> Path:
        """
        CSV with a versioned header comment line.

        Args:
            name: Table name, also the file stem
            frame: Table content
            columns: Column order; defaults to the frame's
        """
        path = self._path(f"{name}.csv")
        if columns is not None:
            frame = frame.reindex(columns=columns)
        with open(path, "w", encoding="utf-8", newline="") as stream:
            stream.write(table_header(name) + "\n")
            frame.to_csv(stream, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return self._record(name, path, rows=len(frame))

    def write_dot(self, name: str, result: RankResult, reduced: bool = True) -> Path:
        path = self._path(f"{name}.dot")
        with open(path, "w", encoding="utf-8", newline="") as stream:
            stream.write(hasse_to_dot(result, name=name, reduced=reduced))
        return self._record("hasse", path, rows=len(result.reduced_arcs if reduced else result.arcs))

    def write_json(self, name: str, content: Any, kind: str = "json") -> Path:
        path = self._path(f"{name}.json")
        with open(path, "w", encoding="utf-8", newline="") as stream:
            json.dump(content, stream, indent=2, sort_keys=True, ensure_ascii=False, default=str)
            stream.write("\n")
        return self._record(kind, path)

    def write_text(self, filename: str, text: str, kind: str = "report") -> Path:
        path = self._path(filename)
        with open(path, "w", encoding="utf-8", newline="") as stream:
            stream.write(text)
        return self._record(kind, path)

    # ============= SUMMARY REPORT =============

    def format_for_export(self, content: Dict[str, Any]) -> str:
        """
        Format a run summary as markdown.

        Args:
            content: title, headline facts, tables (name -> DataFrame) and notes
        """
        lines = []

        if content.get("title"):
            lines.append(f"# {content['title']}\n")

        if content.get("facts"):
            for key, value in content["facts"].items():
                lines.append(f"- **{key}:** {value}")
            lines.append("")

        for name, frame in (content.get("tables") or {}).items():
            lines.append(f"## {name}\n")
            lines.append(_markdown_table(frame))
            lines.append("")

        if content.get("notes"):
            lines.append("## Notes\n")
            for note in content["notes"]:
                lines.append(f"- {note}")

        return "\n".join(lines) + "\n"


def _markdown_table(frame: pd.DataFrame) -> str:
    if frame.empty:
        return "_empty_"
    header = "| " + " | ".join(str(c) for c in frame.columns) + " |"
    rule = "|" + "|".join("---" for _ in frame.columns) + "|"
    rows = []
    for record in frame.itertuples(index=False):
        cells = [f"{v:.4f}" if isinstance(v, float) else str(v) for v in record]
        rows.append("| " + " | ".join(cells) + " |")
    return "\n".join([header, rule] + rows)
