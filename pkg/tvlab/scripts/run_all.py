"""
Run every bundled experiment config and print one verdict per run
"""
import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

from app.core.exceptions import TVLabError
from app.core.logging_config import configure_logging
from app.services.config_loader import load_config
from app.services.experiment_runner import run_experiment

CONFIG_DIR = Path(__file__).parent.parent / "configs"


def run_all(config_dir: Path = CONFIG_DIR) -> int:
    """Run each *.ini under config_dir; returns the number of runs that did not pass"""
    failed = 0
    for path in sorted(config_dir.glob("*.ini")):
        try:
            result = run_experiment(load_config(path))
        except TVLabError as e:
            print(f"ERROR  {path.name}: {e}")
            failed += 1
            continue
        verdict = "PASS" if result.accepted else "FAIL"
        failed += not result.accepted
        print(f"{verdict}   {path.name}: {result.summary.acceptance.predicate}")
    return failed


if __name__ == "__main__":
    configure_logging()
    sys.exit(1 if run_all() else 0)
