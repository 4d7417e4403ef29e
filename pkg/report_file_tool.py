"""
Report File Tool

Turns command results into CSV tables or JSON report documents and saves them
to files with proper error handling and validation.
"""

import csv
import io
import json
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

NUMBER_FORMAT = "%.12g"


@dataclass
class ReportDocument:
    """
    Output of one command: the config it ran with, a results table and the
    pass/fail checks with their tolerances.
    """

    command: str
    config: Dict[str, Any]
    columns: List[str]
    rows: List[List[Any]] = field(default_factory=list)
    checks: List[Dict[str, Any]] = field(default_factory=list)
    notes: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check["passed"] for check in self.checks)

    def add_check(
        self, name: str, passed: bool, tolerance: Optional[float] = None, value: Any = None, detail: str = ""
    ) -> None:
        self.checks.append(
            {"check": name, "passed": bool(passed), "tolerance": tolerance, "value": value, "detail": detail}
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "config": self.config,
            "columns": self.columns,
            "rows": self.rows,
            "checks": self.checks,
            "notes": self.notes,
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ReportDocument":
        return cls(
            command=data["command"],
            config=data.get("config", {}),
            columns=data["columns"],
            rows=data.get("rows", []),
            checks=data.get("checks", []),
            notes=data.get("notes", {}),
        )


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return NUMBER_FORMAT % value
    if isinstance(value, (list, tuple)):
        return ";".join(format_cell(v) for v in value)
    return str(value)


class ReportFileTool:
    """Tool for rendering and saving command reports"""

    def __init__(self):
        self.name = "Report File Tool"
        self.description = (
            "Renders ReportDocuments as CSV (header row, 12 significant digits) or JSON "
            "and saves them to files. Supports creating directories and appending."
        )

    def to_csv(self, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(value) for value in row])
        return buffer.getvalue()

    def to_json(self, document: ReportDocument) -> str:
        return json.dumps(document.to_dict(), indent=2, default=str) + "\n"

    def render(self, document: ReportDocument, as_json: bool = False) -> str:
        if as_json:
            return self.to_json(document)
        return self.to_csv(document.columns, document.rows)

    def save_report(
        self, file_path: str, data: str, append: bool = False, create_dirs: bool = True, encoding: str = "utf-8"
    ) -> str:
        """
        Save rendered report text to a file

        Args:
            file_path: Path where the file should be saved
            data: String data to save
            append: Whether to append to existing file or overwrite
            create_dirs: Whether to create directories if they don't exist
            encoding: File encoding (default: utf-8)
        """
        if not isinstance(data, str):
            return json.dumps(
                {"status": "error", "error": "TypeError", "message": f"Only string data is accepted, got {type(data).__name__}"}
            )
        try:
            return self._save_text(file_path, data, append, create_dirs, encoding)
        except OSError as e:
            return json.dumps({"status": "error", "error": type(e).__name__, "message": str(e), "category": "input"})

    def _ensure_directory(self, file_path: str, create_dirs: bool) -> None:
        directory = os.path.dirname(file_path)
        if directory and not os.path.exists(directory):
            if create_dirs:
                os.makedirs(directory, exist_ok=True)
            else:
                raise FileNotFoundError(f"Directory does not exist: {directory}")

    def _save_text(self, file_path: str, data: str, append: bool, create_dirs: bool, encoding: str) -> str:
        self._ensure_directory(file_path, create_dirs)
        mode = "a" if append else "w"
        with open(file_path, mode, encoding=encoding, newline="") as f:
            f.write(data)
        action_type = "appended to" if append else "saved to"
        return json.dumps(
            {"status": "success", "message": f"Report {action_type} {file_path}", "path": file_path, "characters": len(data)}
        )


if __name__ == "__main__":
    tool = ReportFileTool()
    document = ReportDocument("spectrum", {"k_max": 10.0}, ["index", "k"], [[1, 3.141592653589793]])
    print(tool.render(document))
    print(tool.save_report("data/test_report.csv", tool.render(document)))
