# Matrix files and the command line tool, driven from Python.
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from xfermse.matrixio import read_matrix, write_csv, write_xmat

tmp = Path(tempfile.mkdtemp())
rng = np.random.default_rng(3)
F = rng.standard_normal((100, 5))
Y = F @ rng.standard_normal((5, 2)) + 0.1 * rng.standard_normal((100, 2))
write_xmat(tmp / "feat.xmat", F)
write_csv(tmp / "y.csv", Y)
assert np.array_equal(read_matrix(tmp / "feat.xmat"), F)

def xfermse(*args):
    p = subprocess.run([sys.executable, "-m", "xfermse.cli", *map(str, args)],
                       capture_output=True, text=True)
    return p.returncode, p.stdout, p.stderr

code, out, _ = xfermse("score", "--method", "linmse", "--lambda", "0.5",
                       "--inputs", tmp / "feat.xmat", "--targets", tmp / "y.csv")
print(code, {k: v for k, v in json.loads(out).items() if k in ("method", "value", "lambda")})

code, out, _ = xfermse("bound", "--score", "-0.05", "--d", 5, "--dt", 2, "--M", 1,
                       "--H", 1, "--L", 1, "--delta", 0.05, "--n", 100)
print(code, json.loads(out)["lower_bound"])

# shape errors exit 3 with a one-line message
write_csv(tmp / "short.csv", Y[:10])
code, _, err = xfermse("score", "--method", "labmse",
                       "--inputs", tmp / "feat.xmat", "--targets", tmp / "short.csv")
print(code, err.strip())
