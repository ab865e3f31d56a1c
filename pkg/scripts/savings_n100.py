"""Active versus passive savings at N=100, M=10 (10 and 15 mW budgets)."""

import json
import sys
import tempfile
from pathlib import Path

from _common import parser
from risswipt import cli
from risswipt.scene import dump_config, load_config


def main(argv=None) -> int:
    args = parser(__doc__).parse_args(argv)
    scn = load_config(args.config).replace(N=100)
    out = Path(args.out_dir) / "savings_n100.csv"
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "n100.ini"
        cfg.write_text(dump_config(scn))
        code = cli.main(["sweep", str(cfg), "--axis", "N", "--values", "100", "--trials", str(args.trials),
                         "--schemes", "active,active@15,passive", "--workers", str(args.workers),
                         "--seed", str(args.seed), "--out", str(out)])
    cells = {c["scheme"]: c["mean_total_W"] for c in json.loads(cli.summary_path(out).read_text())["cells"]}
    for s in ("active", "active@15"):
        print(f"{s}: savings over passive {100 * (1 - cells[s] / cells['passive']):.1f}%")
    return code


if __name__ == "__main__":
    sys.exit(main())
