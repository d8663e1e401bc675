# Three ridge-based transferability scores on one toy source/target pair.
import numpy as np

from xfermse import lab_mse, lin_mse, ridge_fit, shared_lab_mse

rng = np.random.default_rng(0)
n = 500

# frozen source features F and a target label Y that depends on a few of them
F = np.maximum(rng.standard_normal((n, 32)), 0.0)
Y = F[:, :4] @ rng.standard_normal((4, 2)) + 0.1 * rng.standard_normal((n, 2))

# dummy labels: the source head's output on the target inputs
head = rng.standard_normal((2, 32)) / 8
Z = F @ head.T

for lam in (0.0, 1.0, 10.0):
    print(f"lam={lam:5}  LinMSE={lin_mse(F, Y, lam).value:+.4f}  "
          f"LabMSE={lab_mse(Z, Y, lam).value:+.4f}")

# LabMSE only touches a 2x2 system, LinMSE a 32x32 one
s = lab_mse(Z, Y, 1.0)
print("LabMSE record:", s.method.value, s.input_dim, "->", s.output_dim,
      f"mse={s.mse_term:.4f} penalty={s.penalty_term:.4f}")

# shared inputs: source labels Ys and target labels Yt observed on the same rows
Ys = rng.standard_normal((n, 3))
Yt = Ys @ rng.standard_normal((3, 2)) + 0.5
print("SharedLabMSE(Ys -> Yt, lam=0):", shared_lab_mse(Ys, Yt, 0.0).value)  # ~0, exact affine map

sol = ridge_fit(F, Y, 1.0)
print("A shape (out x in):", sol.A.shape, " objective:", sol.objective())
