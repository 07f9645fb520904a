"""Smoke test for the pyhaarstat extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`,
or put the compiled module on PYTHONPATH.
"""

import json
import math
import tempfile
from pathlib import Path

import pyhaarstat as hs


def main():
    p = hs.sample_haar_probs(10, seed=7)
    assert p.n_qubits == 10 and len(p) == 1024
    assert abs(sum(p.probs) - 1.0) < 1e-12
    # Same seed, same state.
    assert hs.sample_haar_probs(10, seed=7).probs == p.probs

    law = hs.Law.full_beta(1024)
    pooled = [x for t in range(20) for x in hs.sample_haar_probs(10, 7, t).scaled()]
    ks = hs.ks_one_sample(pooled, law)
    print("full KS", ks)
    assert ks["passed"]

    noisy = hs.depolarize(p, 0.3)
    assert min(noisy.scaled()) >= 0.3 - 1e-12
    assert abs(hs.estimate_gap(noisy.scaled()) - 0.3) < 0.01
    assert law.with_lambda(0.3).cdf(0.29) == 0.0
    assert abs(law.limit_law().pdf(1.0) - math.exp(-1.0)) < 1e-12

    marg = hs.marginalize(p, [0, 1, 2, 3])
    assert len(marg) == 16 and abs(sum(marg) - 1.0) < 1e-12
    cond, weight = hs.conditional_slice(p, [0, 1, 2, 3], 0)
    assert abs(sum(cond) - 1.0) < 1e-12 and 0.0 < weight < 1.0

    shots = hs.draw_samples(p, 20000, seed=8)
    assert shots.total == 20000
    full = hs.xeb_full(shots, p)
    sub = hs.xeb_subsystem(shots, p, [0, 1, 2, 3])
    con = hs.xeb_conditional(shots, p, [0, 1, 2, 3], 0)
    print("xeb", full, sub, con)
    assert abs(full["fidelity"] - 1.0) < 0.4
    uniform = hs.draw_samples(hs.ProbVector.uniform(10), 20000, seed=9)
    assert abs(hs.xeb_full(uniform, p)["fidelity"]) < 0.1

    with tempfile.TemporaryDirectory() as d:
        path = Path(d) / "samples.json"
        hs.write_samples(shots, str(path))
        back = hs.read_samples(str(path))
        assert back.counts() == shots.counts()

        cfg = json.dumps({"n": 10, "trials": 10, "seed": 1, "analysis": "full"})
        summary = json.loads(hs.run_experiment(cfg, d))
        assert summary["passed"], summary["checks"]
        assert (Path(d) / "full_histogram.csv").exists()

    try:
        hs.depolarize(p, 1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("lambda outside [0, 1] accepted")

    print("pyhaarstat smoke test passed")


if __name__ == "__main__":
    main()
