import json
import math

import numpy as np
import pytest
from scipy.stats import pearsonr, spearmanr

from infotests.ait import (
    AitResult,
    embed_distribution,
    fit_submanifold,
    mc_significance,
    randomized_ait_test,
    sample_distributions,
    test_statistic as ait_statistic,
)
from infotests.exact import build_exact_test, enumerate_outcomes, exact_power, hw_tables
from infotests.learning import DisconnectedGraphError
from infotests.manifold import hellinger_distance
from infotests.stats import RngSeed
from infotests.submanifolds import HW, SPHERICAL, hw_map, hw_restricted_statistic

TAU_BAR = 0.3
SIGMA_BAR = np.array([0.3, 0.3, 0.3, 0.5, 0.4, 0.4, 0.4])
O = np.array([3, 5, 4, 6, 9, 2, 1])


def hw_sample(m, s):
    taus = HW.sample_params(m, RngSeed(s, 2**63).generator()).ravel()
    return np.concatenate([[TAU_BAR], taus]), np.array([hw_map(t) for t in np.concatenate([[TAU_BAR], taus])])


@pytest.fixture(scope="module")
def hw_small():
    taus, dists = hw_sample(9, 0)
    return taus, fit_submanifold(dists, knn=5, r=1)


@pytest.fixture(scope="module")
def spherical():
    dists = sample_distributions(SPHERICAL, SIGMA_BAR**2, 100, RngSeed(0, 2**63))
    return fit_submanifold(dists, knn=5, r=2, ell=3, oos_mode="centroid")


class TestFit:
    def test_small_hw_sample_ordering(self, hw_small):
        taus, sub = hw_small
        z = sub.config.points[np.argsort(taus), 0]
        steps = np.diff(z)
        assert np.all(steps > 0) or np.all(steps < 0)
        assert sub.config.points.shape == (10, 1)
        assert sub.graph_params() == {"rule": "knn", "value": 5.0}

    def test_spherical_embedding(self, spherical):
        z = spherical.config.points
        assert z.shape == (101, 2) and np.all(np.isfinite(z))
        d = np.linalg.norm(z[:, None] - z[None, :], axis=-1)
        iu = np.triu_indices(101, 1)
        assert pearsonr(d[iu], spherical.delta[iu])[0] > 0.99

    def test_two_distributions(self):
        p, q = [0.2, 0.3, 0.5], [0.5, 0.3, 0.2]
        sub = fit_submanifold([p, q], knn=1, r=1)
        z = sub.config.points[:, 0]
        assert abs(z[0] - z[1]) == pytest.approx(hellinger_distance(p, q), abs=1e-12)

    def test_null_row_first(self):
        dists = sample_distributions(HW, hw_map(TAU_BAR), 5, RngSeed(3))
        np.testing.assert_array_equal(dists[0], hw_map(TAU_BAR))
        assert dists.shape == (6, 3)

    def test_invalid_row_named(self):
        with pytest.raises(ValueError, match="row 2"):
            fit_submanifold([[0.5, 0.5], [0.4, 0.6], [0.7, 0.7]])

    def test_disconnected_epsilon(self):
        dists = [[0.5, 0.5], [0.49, 0.51], [0.01, 0.99], [0.02, 0.98]]
        with pytest.raises(DisconnectedGraphError):
            fit_submanifold(dists, epsilon=0.05)

    def test_deterministic(self):
        _, dists = hw_sample(30, 4)
        a, b = fit_submanifold(dists), fit_submanifold(dists)
        np.testing.assert_array_equal(a.config.points, b.config.points)


class TestStatistic:
    def test_zero_when_null_is_a_landmark(self):
        # a sampled point coinciding with the null embeds at z_bar
        taus, dists = hw_sample(9, 2)
        dists = np.vstack([dists, hw_map(0.5)])
        dists[1] = hw_map(0.5)
        dists[0] = hw_map(0.5)
        sub = fit_submanifold(dists, knn=5, r=1)
        assert ait_statistic(sub, [1, 2, 1]) == pytest.approx(0.0, abs=1e-12)

    def test_rigid_motion_invariance(self, spherical):
        rng = np.random.default_rng(0)
        q, _ = np.linalg.qr(rng.normal(size=(2, 2)))
        moved_cfg = type(spherical.config)(spherical.config.points @ q.T + rng.normal(size=2), spherical.config.stress)
        moved = type(spherical)(**{**spherical.__dict__, "config": moved_cfg})
        for x in (O, [1, 1, 1, 1, 20, 5, 1], [10, 0, 0, 0, 0, 0, 20]):
            assert ait_statistic(moved, x) == pytest.approx(ait_statistic(spherical, x), abs=1e-10)

    @pytest.mark.filterwarnings("ignore:5-NN graph is disconnected")
    def test_monotone_along_curve(self):
        _, dists = hw_sample(200, 1)
        sub = fit_submanifold(dists, knn=5, r=1)
        for grid in (np.arange(0.3, 1.0001, 0.05), np.arange(0.3, -0.0001, -0.05)):
            stats = [float(np.linalg.norm(embed_distribution(sub, hw_map(t)) - sub.z_bar)) for t in grid]
            assert np.all(np.diff(stats) > 0)

    def test_dimension_mismatch(self, hw_small):
        with pytest.raises(ValueError):
            ait_statistic(hw_small[1], [1, 2, 3, 4])


class TestMonteCarlo:
    def test_zero_statistic_gives_one(self):
        dists = np.array([hw_map(0.5), hw_map(0.5), hw_map(0.2), hw_map(0.8)])
        sub = fit_submanifold(dists, knn=2, r=1)
        res = mc_significance(sub, [1, 2, 1], 200, RngSeed(1))
        assert res.statistic == pytest.approx(0.0, abs=1e-12)
        assert res.p_value == 1.0 and res.exceed_count == 200

    def test_thread_count_independent(self, spherical):
        runs = [mc_significance(spherical, O, 300, RngSeed(7), workers=w) for w in (1, 3, 8)]
        assert len({(r.exceed_count, r.statistic) for r in runs}) == 1

    def test_seed_determinism(self, spherical):
        a = mc_significance(spherical, O, 200, RngSeed(11))
        b = mc_significance(spherical, O, 200, RngSeed(11))
        c = mc_significance(spherical, O, 200, RngSeed(12))
        assert a.to_dict() == b.to_dict()
        assert a.exceed_count != c.exceed_count or a.p_value == c.p_value

    def test_add_one(self, spherical):
        a = mc_significance(spherical, O, 100, RngSeed(5))
        b = mc_significance(spherical, O, 100, RngSeed(5), add_one=True)
        assert b.p_value == pytest.approx((a.exceed_count + 1) / 101)
        assert b.p_value_convention == "add_one" and a.p_value_convention == "fraction"

    def test_doubling_b(self, spherical):
        small = mc_significance(spherical, O, 1000, RngSeed(9))
        big = mc_significance(spherical, O, 2000, RngSeed(9))
        se = math.sqrt(max(big.p_value * (1 - big.p_value), 1e-3) / 1000)
        assert abs(small.p_value - big.p_value) < 4 * se
        assert 0 <= small.p_value <= 1

    def test_json(self, spherical):
        d = json.loads(mc_significance(spherical, O, 50, RngSeed(2)).to_json())
        for key in ("statistic", "p_value", "B", "exceed_count", "seed", "graph_params", "r", "ell", "oos_mode"):
            assert key in d
        assert d["B"] == 50 and d["r"] == 2 and d["ell"] == 3 and d["oos_mode"] == "centroid"
        assert d["seed"] == {"master_seed": 2, "stream_id": 0}

    def test_bad_b(self, spherical):
        with pytest.raises(ValueError):
            mc_significance(spherical, O, 0, RngSeed(0))


class TestRandomizedAit:
    def test_exact_size(self, hw_small):
        _, sub = hw_small
        test = randomized_ait_test(sub, 0.05, 30)
        table = test.meta["table"]
        assert len(table.outcomes) == 496
        assert exact_power(test, table, hw_map(TAU_BAR)) == pytest.approx(0.05, abs=1e-12)

    def test_alpha_zero(self, hw_small):
        test = randomized_ait_test(hw_small[1], 0.0, 10)
        for t in (0.0, 0.3, 0.9):
            assert exact_power(test, test.meta["table"], hw_map(t)) == 0.0

    def test_enumeration_cap(self, spherical):
        with pytest.raises(ValueError, match="cap"):
            randomized_ait_test(spherical, 0.05, 30, max_outcomes=10**5)

    def test_beats_unrestricted_near_null(self, hw_small):
        _, sub = hw_small
        test = randomized_ait_test(sub, 0.05, 30)
        unrestricted, _ = hw_tables(30, TAU_BAR)
        t_u = build_exact_test(unrestricted, 0.05)
        wins = [
            exact_power(test, test.meta["table"], hw_map(t)) > exact_power(t_u, unrestricted, hw_map(t))
            for t in np.arange(0.01, 0.21, 0.01)
        ]
        assert np.mean(wins) >= 0.9


@pytest.mark.slow
@pytest.mark.filterwarnings("ignore:5-NN graph is disconnected")
def test_converges_to_restricted_statistic():
    # near 1 the correlation saturates and single samples can dip between m=50 and m=200,
    # so the increase is checked on the mean over independent samples
    outcomes = enumerate_outcomes(30, 3)
    oracle = [hw_restricted_statistic(x, TAU_BAR) for x in outcomes]
    corr = np.empty((10, 3))
    for s in range(10):
        for j, m in enumerate((9, 50, 200)):
            _, dists = hw_sample(m, s)
            sub = fit_submanifold(dists, knn=5, r=1)
            corr[s, j] = spearmanr([ait_statistic(sub, x) for x in outcomes], oracle)[0]
    mean = corr.mean(axis=0)
    assert mean[0] < mean[1] < mean[2]
    assert np.all(corr[:, 2] > 0.95)


def test_result_roundtrip():
    res = AitResult(0.5, 0.1, 10, 1, RngSeed(3, 4), meta={"r": 1})
    assert json.loads(res.to_json())["seed"] == {"master_seed": 3, "stream_id": 4}


@pytest.mark.slow
def test_spherical_median_over_submanifold_samples():
    # one submanifold sample gives a p-value spread far wider than Monte Carlo error;
    # the median over independent samples sits near 0.0275
    p = []
    for s in range(20):
        dists = sample_distributions(SPHERICAL, SIGMA_BAR**2, 100, RngSeed(s, 2**63))
        sub = fit_submanifold(dists, knn=5, r=2, ell=3, oos_mode="centroid")
        p.append(mc_significance(sub, O, 2000, RngSeed(s)).p_value)
    assert 0.0155 <= np.median(p) <= 0.0395
    assert max(p) / min(p) > 5
