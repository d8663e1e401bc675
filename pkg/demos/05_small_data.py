# Few target samples: unregularized LinMSE interpolates, a little ridge helps.
from xfermse import TaskSpec, generate_task_family, small_data_sweep

family = generate_task_family(TaskSpec(seed=0), 6, 5)
table = small_data_sweep(family, [16, 32, 128], repeats=10, lambdas=[0.0, 1.0])

for (size, method, lam), reps in sorted(table.items()):
    print(f"n={size:4d} {method} lam={lam}: mean pearson {reps['pearson'].value:+.3f}")
# with 16 or 32 rows and 64 features the lam=0 score is 0 for every pair,
# so its correlation is undefined and counted as 0
