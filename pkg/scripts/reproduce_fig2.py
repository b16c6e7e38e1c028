"""Regenerate the alpha = 0.6, T = 5 ROC panels (beta = 0.3 ... 1.0).

    python3 scripts/reproduce_fig2.py                 # 1e5 pairs, about a minute
    python3 scripts/reproduce_fig2.py --n-pairs 10000000 --out results/fig2_full

Extra arguments are passed to ``ecspade run``. A table of pD at pFA = 1e-2
(mean of the trials) is printed at the end.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))
from _figure import reproduce  # noqa: E402

if __name__ == "__main__":
    sys.exit(reproduce("fig2", sys.argv[1:]))
