"""Smoke test for the noma_underlay Python extension.

Build and install first:  maturin develop -m crates/python/Cargo.toml
Then run:                 python python/smoke_test.py
"""

import csv
import io
import json
import math

import noma_underlay as nu


def main() -> None:
    profile = nu.ChannelProfile.default()
    split = nu.PowerSplit.from_a2(0.1)
    two = nu.AntennaConfig(2, 2)

    r = nu.rates(10.0, profile, split)
    assert abs(r["rate_s1"] - 0.6605903067759622) < 1e-8, r
    assert abs(r["rate_s2"] - 0.8188125473318013) < 1e-8, r
    assert r["rate_sum"] == r["rate_s1"] + r["rate_s2"]
    assert r["method_s1"] == "closed_form"

    cf = nu.rates(10.0, profile, split, two)
    quad = nu.rates_by_quadrature(10.0, profile, split, two)
    assert abs(cf["rate_s1"] - quad[0]) < 1e-6 and abs(cf["rate_s2"] - quad[1]) < 1e-6

    sim = nu.SimConfig(n_samples=200_000, seed=7)
    s1, s2 = nu.simulate_rates(10.0, profile, split, two, sim)
    assert s1.z_score(cf["rate_s1"]) < 4 and s2.z_score(cf["rate_s2"]) < 4, (s1, s2)
    oma = nu.simulate_oma_rate(10.0, profile, two, sim)
    assert oma.mean > 0 and oma.n == 200_000

    o1, o2 = nu.outage_probabilities(1.0, 1.0, 10.0, profile, split, two)
    m1, m2 = nu.simulate_outage(1.0, 1.0, 10.0, profile, split, two, sim)
    assert 0 < o1 < 1 and 0 < o2 < 1
    assert abs(m1.mean - o1) < 4 * math.sqrt(o1 * (1 - o1) / sim.n_samples)
    assert abs(m2.mean - o2) < 4 * math.sqrt(o2 * (1 - o2) / sim.n_samples)

    spec = nu.SweepSpec.default().with_q_db([0.0, 10.0, 20.0, 30.0]).with_simulation(n_samples=20_000)
    table = spec.run()
    assert len(table) == 12
    rows = table.rows()
    assert list(rows[0]) == nu.COLUMNS
    parsed = list(csv.DictReader(io.StringIO(table.to_csv())))
    assert float(parsed[5]["rate_sum_cf"]) == rows[5]["rate_sum_cf"]
    assert json.loads(table.to_json())[0]["n_r"] == 1
    assert spec.run().to_csv() == table.to_csv()
    for n_r, n_d, q, _ in table.crossovers():
        print(f"crossover ({n_r},{n_d}): {q}")

    restricted = nu.SweepSpec.from_toml(
        '[grid]\nq_db = [0.0]\nantennas = [[1, 1]]\n[output]\ninclude = ["rates_closed"]\n'
    )
    assert restricted.run().rows()[0]["rate_oma_mc"] is None

    checks = spec.with_simulation(n_samples=200_000).validate()
    assert checks and all(c["z"] < 4 for c in checks), max(c["z"] for c in checks)

    for bad in (
        lambda: nu.ChannelProfile(1.0, 2.0, 1.0, 1.0, 1.0),
        lambda: nu.PowerSplit(0.5, 0.6),
        lambda: nu.AntennaConfig(0, 1),
        lambda: nu.SimConfig(n_samples=10),
        lambda: nu.SweepSpec.from_toml("[grid]\nantennas = []\n"),
        lambda: nu.rates(-1.0, profile, split),
    ):
        try:
            bad()
        except ValueError as e:
            print(f"rejected: {e}")
        else:
            raise AssertionError("invalid input accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
