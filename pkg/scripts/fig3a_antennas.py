"""Total power versus number of BS antennas for all benchmark schemes."""

import sys
from pathlib import Path

from _common import parser
from risswipt import cli

SCHEMES = "active,active@15,active_random_rho,passive,passive_random_rho,passive_random_phase,no_ris"


def main(argv=None) -> int:
    ap = parser(__doc__)
    ap.add_argument("--values", default="6,8,10,12")
    args = ap.parse_args(argv)
    out = Path(args.out_dir) / "fig3a_antennas.csv"
    return cli.main(["sweep", args.config, "--axis", "M", "--values", args.values, "--trials",
                     str(args.trials), "--schemes", SCHEMES, "--workers", str(args.workers),
                     "--seed", str(args.seed), "--out", str(out)])


if __name__ == "__main__":
    sys.exit(main())
