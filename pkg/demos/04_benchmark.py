# Synthetic source/target family, actual transfer by head retraining, lambda sweep.
import numpy as np

from xfermse import TaskSpec, generate_task_family, head_retrain, run_benchmark

spec = TaskSpec(seed=0)                    # n_train=2000, 64 features, noise 0.05
family = generate_task_family(spec, n_sources=6, n_targets=5)
print("core units per source:", [s.n_core for s in family.sources])

h = head_retrain(family, 0, 0)
print("pair (0,0) train/test -mse:", h.train_neg_mse, h.test_neg_mse)

lams = [0.0, 0.1, 1.0, 10.0]
res = run_benchmark(family, lams, check_lemmas=True)
print("pairs:", len(res.pairs), " lemma violations:", res.lemma_violations())

for method in ("LinMSE", "LabMSE", "SharedLabMSE"):
    row = "  ".join(f"{res.correlation(method, l).value:+.3f}" for l in lams)
    print(f"{method:13s} pearson over lambda {lams}: {row}")

# scores only go down as lambda grows
v = np.array([[p.scores["LinMSE"][l] for l in lams] for p in res.pairs])
print("monotone:", bool(np.all(np.diff(v, axis=1) <= 1e-12)))
