"""Total power versus CSI error variance (M=10, N=40, p_max=15 mW).

Each scheme is designed on perturbed channel estimates; the reported power is
the beamforming stage re-solved on the true channels with the surface fixed.
"""

import sys
import tempfile
from pathlib import Path

from _common import parser
from risswipt import cli
from risswipt.scene import dump_config, load_config

SCHEMES = "active,passive,passive_random_phase,no_ris"


def main(argv=None) -> int:
    ap = parser(__doc__)
    ap.add_argument("--values", default="0,0.02,0.04,0.06,0.08,0.1")
    args = ap.parse_args(argv)
    scn = load_config(args.config).replace(N=40, p_max=15e-3)
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "fig3c.ini"
        cfg.write_text(dump_config(scn))
        out = Path(args.out_dir) / "fig3c_csi.csv"
        return cli.main(["sweep", str(cfg), "--axis", "xi", "--values", args.values, "--trials",
                         str(args.trials), "--schemes", SCHEMES, "--workers", str(args.workers),
                         "--seed", str(args.seed), "--out", str(out)])


if __name__ == "__main__":
    sys.exit(main())
