"""Artifact service for writing reports, sweep results and tables to disk."""

import csv
import io
from pathlib import Path
from typing import Optional, Tuple

from overlapix.core.config import Settings, get_settings
from overlapix.core.logging import get_logger
from overlapix.models.pauli import CharacteristicTable
from overlapix.schemas.report import ArtifactModel, round_floats
from overlapix.schemas.sweep import SweepResult

logger = get_logger(__name__)


class ArtifactService:
    """Writes UTF-8, LF-terminated artifacts below a base directory."""

    def __init__(self, settings: Optional[Settings] = None):
        """Initialize the service; the base directory defaults to ``settings.output_dir``."""
        self.settings = settings or get_settings()
        self.base_path = Path(self.settings.output_dir)

    def resolve(self, file_name: str) -> Path:
        path = Path(file_name)
        return path if path.is_absolute() else self.base_path / path

    def write_text(self, content: str, file_name: str) -> Path:
        """Write ``content`` to ``file_name``.

        Args:
            content: Text to store; line endings are written as given
            file_name: Path relative to the base directory, or absolute

        Returns:
            The path written
        """
        file_path = self.resolve(file_name)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(content)

        logger.info("Artifact written", path=str(file_path), size=len(content))
        return file_path

    def write_json(self, artifact: ArtifactModel, file_name: str) -> Path:
        return self.write_text(artifact.to_json(), file_name)

    def write_sweep(self, result: SweepResult, stem: str) -> Tuple[Path, Path]:
        """Write ``<stem>.csv`` (one line per row) and ``<stem>.json`` (summary with assertions).

        Returns:
            Tuple of (csv_path, json_path)
        """
        csv_path = self.write_text(result.to_csv(), f"{stem}.csv")
        json_path = self.write_json(result, f"{stem}.json")
        logger.info(
            "Sweep artifacts written",
            family=result.spec.family.value,
            csv=str(csv_path),
            json=str(json_path),
            digest=result.digest(),
        )
        return csv_path, json_path

    @staticmethod
    def table_csv(table: CharacteristicTable) -> str:
        """Characteristic table as CSV with columns index, xbits, zbits, value."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["index", "xbits", "zbits", "value"])
        for index, xbits, zbits, value in table.csv_rows():
            writer.writerow([index, xbits, zbits, round_floats(float(value))])
        return buffer.getvalue()

    def write_table(self, table: CharacteristicTable, file_name: str) -> Path:
        return self.write_text(self.table_csv(table), file_name)
