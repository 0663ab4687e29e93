import sys
from pathlib import Path

PLOTS_DIR = Path(__file__).resolve().parent.parent
if str(PLOTS_DIR) not in sys.path:
    sys.path.insert(0, str(PLOTS_DIR))
