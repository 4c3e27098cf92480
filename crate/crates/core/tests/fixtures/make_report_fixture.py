"""Writes results_fixture.jsonl and the expected report CSVs in golden/.

The expected values are computed here independently of the Rust code:
numpy-style linear percentiles, pooled normal 90% intervals and paired
differences.
"""
import json
import math
import random
from pathlib import Path

HERE = Path(__file__).parent
rng = random.Random(20240611)


def rfmt(v):
    """Rust `Display` for the f64 values used here."""
    return str(int(v)) if float(v).is_integer() else repr(v)


def mean_std(xs):
    m = sum(xs) / len(xs)
    if len(xs) == 1:
        return m, 0.0
    return m, math.sqrt(sum((x - m) ** 2 for x in xs) / (len(xs) - 1))


def pct(sorted_xs, q):
    pos = q * (len(sorted_xs) - 1)
    lo, hi = math.floor(pos), math.ceil(pos)
    return sorted_xs[lo] + (pos - lo) * (sorted_xs[hi] - sorted_xs[lo])


settings = dict(dataset="fixture", epochs=20, k=2, n_sims=2, subsample=None, master_seed=0)
skey = "dataset=fixture;epochs=20;k=2;sims=2;subsample=all;seed=0"
base = dict(eta=0.03, lambda_p=0.0001, chi=0.01, kappa=200)
level = {"srbfn": 20.0, "arithmetic": 30.0, "linear": 40.0}

records = []
for m in (2, 10):
    for eps in (0.0, 0.35):
        for ls in (0.0, 5.0):
            hyper = dict(m=m, epsilon=eps, lambda_s=ls, **base)
            hkey = (f"M={m};eps={rfmt(eps)};eta={rfmt(base['eta'])};lambda_p={rfmt(base['lambda_p'])};"
                    f"chi={rfmt(base['chi'])};kappa={base['kappa']};lambda_s={rfmt(ls)}")
            for model in ("srbfn", "arithmetic", "linear"):
                centre = level[model] - (3.0 if eps > 0 and model == "srbfn" else 0.0) + m / 10
                spread = 4.0 if ls == 0 else 1.0
                test = [round(centre + rng.uniform(-spread, spread), 4) for _ in range(4)]
                if model == "srbfn" and m == 10 and eps == 0.0 and ls == 5.0:
                    test[1] = None
                if model == "arithmetic" and m == 2 and eps == 0.35 and ls == 5.0:
                    test = [None] * 4
                ok = [t for t in test if t is not None]
                mean, std = mean_std(ok) if ok else (None, None)
                records.append(dict(
                    schema=1, key=f"{skey}|{hkey}", model=model,
                    config={**hyper, **settings},
                    test_rmse=test, train_rmse=[None] * 4,
                    failed=4 - len(ok), mean_rmse=mean, std_rmse=std, wall_seconds=1.5,
                ))

with open(HERE / "results_fixture.jsonl", "w") as f:
    for r in records:
        f.write(json.dumps(r, separators=(",", ":")) + "\n")


def write(name, header, rows):
    with open(HERE / "golden" / name, "w", newline="") as f:
        f.write(",".join(header) + "\n")
        for r in rows:
            f.write(",".join(r) + "\n")


f6 = lambda v: "%.6f" % v
labels = {"srbfn": "s-RBFN", "arithmetic": "Arithmetic Combiner", "linear": "Linear Model"}

rows = []
for model in ("srbfn", "arithmetic", "linear"):
    rs = [r for r in records if r["model"] == model]
    ok = [r for r in rs if r["mean_rmse"] is not None]
    top = min(ok, key=lambda r: (r["mean_rmse"], r["key"]))
    means = sorted(r["mean_rmse"] for r in ok)
    rows.append([labels[model], f6(top["mean_rmse"]), f6(top["std_rmse"]), f6(pct(means, 0.25)),
                 f6(pct(means, 0.75)), str(len(rs)), str(sum(r["failed"] for r in rs)), top["key"]])
write("summary.csv", ["model", "top_model", "std_dev", "first_quartile", "third_quartile", "configs",
                      "failed_runs", "top_config"], rows)

by_key = {}
for r in records:
    by_key.setdefault(r["key"], {})[r["model"]] = r
rows = []
for key in sorted(by_key):
    ms = by_key[key]
    c = ms["srbfn"]["config"]
    row = [str(c["m"]), str(c["kappa"]), rfmt(c["eta"]), rfmt(c["chi"]), rfmt(c["epsilon"]),
           rfmt(c["lambda_p"]), rfmt(c["lambda_s"])]
    for model in ("srbfn", "arithmetic", "linear"):
        r = ms[model]
        row += [f6(r["mean_rmse"]) if r["mean_rmse"] is not None else "",
                f6(r["std_rmse"]) if r["std_rmse"] is not None else "", str(r["failed"])]
    rows.append(row)
write("configs.csv", ["M", "kappa", "eta", "chi", "eps", "lambda_p", "lambda_s", "srbfn_mean", "srbfn_std",
                      "srbfn_failed", "arithmetic_mean", "arithmetic_std", "arithmetic_failed", "linear_mean",
                      "linear_std", "linear_failed"], rows)

srbfn = [r for r in records if r["model"] == "srbfn"]
cells = {}
for r in srbfn:
    c = r["config"]
    cells.setdefault((c["m"], c["epsilon"]), []).extend(t for t in r["test_rmse"] if t is not None)
rows = []
for (m, eps) in sorted(cells):
    obs = cells[(m, eps)]
    mean, std = mean_std(obs)
    rows.append([f"M={m} eps={rfmt(eps)}", str(m), rfmt(eps), f6(mean), f6(1.645 * std / math.sqrt(len(obs))),
                 str(len(obs))])
write("diversity.csv", ["label", "M", "eps", "mean_rmse", "ci90_half_width", "n"], rows)

prof = {}
for r in srbfn:
    prof.setdefault(r["config"]["lambda_s"], []).append((r["mean_rmse"], r["std_rmse"]))
rows = []
for ls in sorted(prof):
    means = [p[0] for p in prof[ls]]
    stds = [p[1] for p in prof[ls]]
    rows.append([rfmt(ls), f6(mean_std(means)[0]), f6(mean_std(stds)[0]), f6(mean_std(means)[1]),
                 str(len(means))])
write("regularization.csv", ["lambda_s", "mean_rmse", "mean_std_rmse", "std_of_mean_rmse", "configs"], rows)

rows = []
for m in (2, 10):
    for alt in (0.35,):
        pairs = []
        for r in srbfn:
            c = r["config"]
            if c["m"] != m or c["epsilon"] != 0.0:
                continue
            twin = next(q for q in srbfn if q["config"]["m"] == m and q["config"]["epsilon"] == alt
                        and q["config"]["lambda_s"] == c["lambda_s"])
            pairs += [(b, a) for b, a in zip(r["test_rmse"], twin["test_rmse"]) if b is not None and a is not None]
        diffs = [a - b for b, a in pairs]
        md, sd = mean_std(diffs)
        hw = 1.645 * sd / math.sqrt(len(diffs))
        rows.append([str(m), "0", rfmt(alt), f6(mean_std([b for b, _ in pairs])[0]),
                     f6(mean_std([a for _, a in pairs])[0]), f6(md), f6(hw), str(len(diffs)),
                     "true" if md + hw < 0 else "false"])
write("diversity_pairs.csv", ["M", "eps_base", "eps_alt", "mean_base", "mean_alt", "mean_diff", "ci90_half_width",
                              "pairs", "alt_significantly_lower"], rows)
