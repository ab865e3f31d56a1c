"""Per-iteration BS power of the alternating algorithm (N=20, M=10, p_max 10 and 15 mW)."""

import sys
from pathlib import Path

from _common import parser
from risswipt import cli


def main(argv=None) -> int:
    ap = parser(__doc__)
    ap.add_argument("--seeds", default="0,1,2,3,4")
    args = ap.parse_args(argv)
    out = Path(args.out_dir) / "fig2_convergence.csv"
    return cli.main(["convergence", args.config, "--seeds", args.seeds, "--pmax-list", "10,15",
                     "--out", str(out)])


if __name__ == "__main__":
    sys.exit(main())
