"""Smoke test for the pywzchain extension.

Build and install first:
    maturin build --release -m crates/py/Cargo.toml -o build/wheels
    pip install build/wheels/pywzchain-*.whl
"""

import math

import pywzchain as wz


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    # quantizer: k=4, eps=1, delta'=1 decodes the coset point nearest h
    assert wz.mq_encode(2.0, 4, 1.0, 1.0, 0.5) == 2
    assert wz.mq_decode(2, 2.0, 4, 1.0, 1.0) == 2.0
    expected, worst = wz.mq_oracle(0.3, 0.1, 8, 2 * 1.5 / 6, 1.5)
    assert close(expected, 0.3), expected
    assert worst < 0.5

    rot = wz.Rotation(300, seed=3, client=1)
    assert rot.dim == 512
    v = [math.sin(i) for i in range(300)]
    back = rot.inverse(rot.apply(v))
    assert max(abs(a - b) for a, b in zip(back, v)) < 1e-9

    params = wz.CodecParams(16, 256, 64)
    assert (params.k, params.log_k, params.sample_count) == (8, 3, 21)

    assert close(wz.c_t(2, 16), 2304 / math.e)
    assert abs(wz.d_value([1.0, 1.0], 16) - 19.824) < 1e-3
    assert wz.region2_check(1.0, 1.0, 10.0, 16)
    assert not wz.region2_check(1.0, 1.0, 2.0, 16)
    assert wz.baseline_bound([1.0] * 16, 16, 256, 64) == 65.75

    inst = wz.Instance.star(16, 256, 1.0, 1.0, 10.0, seed=5)
    table = inst.table
    plan = wz.Plan.algorithm2(table, 16)
    plan.validate()
    assert plan.decode_order[0] == 0
    assert all(c == [0, i] for i, c in enumerate(plan.chains) if i > 0)
    wz_plan = wz.Plan.wyner_ziv(table)
    assert wz.Plan.from_text(plan.to_text(), table).chains == plan.chains

    b = wz.proposed_bound(plan, table, params)
    assert b["improvement_region"] and b["proposed"] < b["baseline"]
    assert close(b["ratio"], wz.remark1_ratio(b["sum_d"], b["sum_delta_sq"], 3))

    t = wz.run_trial(inst, plan, params, seed=1, trial=0)
    assert t["bits_sent"] == 16 * 21 * 3
    pro = wz.monte_carlo(inst, plan, params, 200, seed=1)
    base = wz.monte_carlo(inst, wz_plan, params, 200, seed=1)
    assert pro["mse"] < base["mse"], (pro["mse"], base["mse"])

    cfg = """
n = 16
d = 256
r = 64
trials = 20
seed = 7
delta_t = 1.0
delta_ti = 1.0
delta_i = 10.0
"""
    csv = wz.simulate(cfg)
    assert csv == wz.simulate(cfg)
    header, *rows = csv.strip().splitlines()
    assert header.startswith("estimator,n,d,r,k")
    assert [r.split(",")[0] for r in rows] == ["wz", "pro-alg2"]
    assert "0,alg2," in wz.bounds_report(cfg)
    assert "4.5,19.8232642687" in wz.region_sweep()

    try:
        wz.CodecParams(16, 256, 5)
    except ValueError as e:
        assert "budget" in str(e)
    else:
        raise AssertionError("expected ValueError")

    print("pywzchain smoke test: ok")


if __name__ == "__main__":
    main()
