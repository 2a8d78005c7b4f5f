"""Writing command products to stdout or to files."""

import sys
from typing import Optional

from overlapix.core.logging import get_logger
from overlapix.schemas.run_config import RunConfig
from overlapix.schemas.sweep import SweepResult
from overlapix.services.artifact_service import ArtifactService

logger = get_logger(__name__)


def emit(text: str, output: Optional[str] = None) -> None:
    """Print ``text`` or store it at ``output``."""
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        ArtifactService().write_text(text, output)


def emit_sweep(result: SweepResult, config: RunConfig) -> int:
    """Print the sweep summary, write ``<output>.csv``/``.json`` when asked, and map it to an exit code.

    Returns:
        0 when every assertion passed, 1 otherwise
    """
    if config.output is not None:
        ArtifactService().write_sweep(result, config.output)
    sys.stdout.write(result.to_csv() if config.format == "csv" else result.to_json())
    sys.stdout.flush()

    for assertion in result.assertions:
        if not assertion.passed:
            logger.error("Assertion failed", name=assertion.name, detail=assertion.detail)
    return 0 if result.passed else 1
