"""
Write the JSON Schema of every CLI report document to data/schemas/
Re-run whenever app/models/schemas.py changes
"""

import sys
import json
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

from app.models.schemas import REPORT_MODELS
from app.utils.logger import get_logger, set_log_level

logger = get_logger(__name__)


def export_schemas(target: Path = Path(__file__).parent.parent / "data" / "schemas") -> list:
    """Dump one <command>.schema.json per report model"""
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for command, model in REPORT_MODELS.items():
        path = target / f"{command}.schema.json"
        path.write_text(json.dumps(model.model_json_schema(), indent=2) + "\n", encoding="utf-8")
        logger.info(f"Wrote {path}")
        written.append(path)
    return written


if __name__ == "__main__":
    set_log_level("INFO")
    try:
        export_schemas()
    except Exception as e:
        logger.error(f"Schema export failed: {e}", exc_info=True)
        sys.exit(1)
