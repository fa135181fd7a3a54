"""Desk-scale runs of the theorem experiments.

Each block prints the quantitative conclusion being probed and the observed
numbers: linear progress with drift 1/2 against the exact radial law, the
spectral-radius ratio 3/4, the CLT shape of |w_n|, translation-length
genericity, and the deviation tail with its push-forward twin.  Takes about
half a minute.
"""

from treewalk import radial
from treewalk.experiments import ExperimentConfig, run_experiment

print("== exact radial oracle (no Monte Carlo)")
print("E|w_n|/n at n = 10^4:", radial.mean_length(10_000) / 10_000)
print("Var|w_n|/n at n = 10^4:", radial.variance_length(10_000) / 10_000)
print("return ratio P[|w_2002|=0]/P[|w_2000|=0]:", radial.return_ratio(2000),
      "(squared spectral radius 3/4)")
print("P[|w_200| < 50]:", radial.tail_below(200, 50))

print("\n== linear progress (drift about 1/2, Monte Carlo vs oracle)")
rep = run_experiment(ExperimentConfig(
    "demo-lp", "linear_progress", n_grid=[200, 500, 1000], trajectories=2000,
    master_seed=1))
print("drift estimate:", round(rep.statistics["drift"], 4))
for check in rep.checks:
    print("  ", check["name"], "->", check["passed"], "|", check["detail"])

print("\n== CLT shape at n = 4000")
rep = run_experiment(ExperimentConfig(
    "demo-clt", "clt", n_grid=[4000], trajectories=6000, master_seed=2))
print("sigma^2 per step:", round(rep.statistics["sigma2_per_step"], 4),
      "(3/4 in the limit)")
print("KS to the standard normal:", round(rep.fits["ks_known_normalization"], 4),
      "| exact law KS:", round(rep.fits["ks_exact_law_vs_normal"], 4))

print("\n== translation length at n = 200 (loxodromics are generic)")
rep = run_experiment(ExperimentConfig(
    "demo-tau", "translation_length", n_grid=[200], trajectories=5000,
    master_seed=3))
print("fraction with tau > n/4:", rep.statistics["fraction_tau_above_cut"],
      "| loxodromic fraction:", rep.statistics["fraction_loxodromic"])

print("\n== deviation from the geodesic at k = n/2, with the suffix-swap twin")
rep = run_experiment(ExperimentConfig(
    "demo-dev", "deviation", n_grid=[600], trajectories=30000, master_seed=4,
    params={"k": 300, "compare_pushforward": True}))
print("mean deviation:", round(rep.statistics["deviation_mean"], 4),
      "| per-level tail ratio:", round(rep.fits["tail"]["ratio"], 4))
print("pushforward mean:", round(rep.statistics["pushforward"]["deviation_mean"], 4),
      "| max pathwise gap:", rep.statistics["pushforward"]["max_pathwise_gap"])

print("\n== backtracking of projection sums (running max stays small)")
rep = run_experiment(ExperimentConfig(
    "demo-bt", "backtracking", germ="a", threshold=3, n_grid=[400],
    trajectories=4000, master_seed=5, params={"o": "1", "p": "a5b5a5"}))
print("P[max sum >= 20]:",
      rep.statistics["tail"]["probs"][rep.statistics["tail"]["levels"].index(20)])
print("chain:", [c["rep"] for c in rep.statistics["chain"]["cosets"]])
