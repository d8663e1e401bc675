# Judging an estimator: correlation with actual transfer, and top-k source picks.
import numpy as np

from xfermse import kendall_tau, linear_fit_rmse, pearson, spearman, top_k_matching_rate

rng = np.random.default_rng(2)
actual = -rng.gamma(2.0, 0.2, size=(8, 4))          # 8 sources x 4 targets
scores = actual + 0.05 * rng.standard_normal(actual.shape)

a, s = actual.ravel(), scores.ravel()
for fn in (pearson, spearman, kendall_tau):
    rep = fn(s, a)
    print(f"{rep.metric:9s} {rep.value:.4f}  n={rep.n_pairs}  p={rep.p_value}")
print("linear fit rmse:", linear_fit_rmse(s, a))

for k in (1, 2, 3):
    r = top_k_matching_rate(scores, actual, k)
    print(f"top-{k}: {r.m_match}/{r.m_target} picks=" + str(r.selected))

# Kendall handles ties in both vectors
print(kendall_tau([1, 1, 2, 3], [1, 2, 2, 3]).value)
