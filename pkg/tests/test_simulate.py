import io

import numpy as np
import pytest

from qpanet.analytic import ModelParams
from qpanet.errors import DomainError, GraphParseError
from qpanet.quality import make_bernoulli, make_exponential
from qpanet.simulate import (
    empirical_report,
    grow_qpa,
    grow_uniform,
    joint_histogram,
    load_graph,
    write_edge_list,
)


def small_params(beta=2):
    return ModelParams(beta=beta, quality=make_exponential(0.5, 4))


class TestGrowth:
    def test_edge_count_formula(self):
        net = grow_qpa(1000, small_params(2), seed=1)
        assert len(net.edges) == 3 + 2 * (1000 - 3)
        assert int(net.degrees.sum()) == 2 * len(net.edges)

    def test_min_degree_nonseed(self):
        net = grow_qpa(1000, small_params(2), seed=2)
        assert net.degrees[3:].min() >= 2
        netu = grow_uniform(1000, ModelParams(beta=3, quality=make_bernoulli(0.5, 4)), 3)
        assert netu.degrees[4:].min() >= 3

    def test_structural_invariants(self):
        for grow in (grow_qpa, grow_uniform):
            net = grow(2000, small_params(2), seed=5)
            net.validate()

    def test_determinism_byte_identical(self):
        p = small_params(2)
        a = grow_qpa(5000, p, seed=77)
        b = grow_qpa(5000, p, seed=77)
        bufa, bufb = io.StringIO(), io.StringIO()
        write_edge_list(a, bufa)
        write_edge_list(b, bufb)
        assert bufa.getvalue() == bufb.getvalue()
        assert np.array_equal(a.qualities, b.qualities)

    def test_seed_changes_output(self):
        p = small_params(2)
        a = grow_qpa(500, p, seed=1)
        b = grow_qpa(500, p, seed=2)
        assert not np.array_equal(a.edges, b.edges)

    def test_too_small_rejected(self):
        with pytest.raises(DomainError):
            grow_qpa(3, small_params(2), seed=0)

    def test_qualities_within_range(self):
        net = grow_qpa(2000, small_params(2), seed=9)
        assert net.qualities.min() >= 0
        assert net.qualities.max() <= 4

    def test_provenance_and_seed_recorded(self):
        net = grow_uniform(100, small_params(2), seed=4)
        assert net.provenance == "uniform"
        assert net.seed == 4


class TestLoadGraph:
    def test_triangle(self, tmp_path):
        ep = tmp_path / "e.txt"
        qp = tmp_path / "q.txt"
        ep.write_text("0 1\n1 2\n2 0\n")
        qp.write_text("0 0\n1 0\n2 5\n")
        net = load_graph(ep, qp)
        assert net.n == 3
        assert list(net.degrees) == [2, 2, 2]
        assert net.provenance == "ingested"
        assert net.seed is None

    def test_self_loop_names_line(self, tmp_path):
        ep = tmp_path / "e.txt"
        qp = tmp_path / "q.txt"
        ep.write_text("0 1\n7 7\n")
        qp.write_text("0 0\n1 0\n7 1\n")
        with pytest.raises(GraphParseError, match="line 2"):
            load_graph(ep, qp)

    def test_duplicate_edge_names_line(self, tmp_path):
        ep = tmp_path / "e.txt"
        qp = tmp_path / "q.txt"
        ep.write_text("0 1\n1 0\n")
        qp.write_text("0 0\n1 0\n")
        with pytest.raises(GraphParseError, match="line 2"):
            load_graph(ep, qp)

    def test_missing_quality_names_node(self, tmp_path):
        ep = tmp_path / "e.txt"
        qp = tmp_path / "q.txt"
        ep.write_text("0 1\n1 2\n")
        qp.write_text("0 0\n1 0\n")
        with pytest.raises(GraphParseError, match="node 2"):
            load_graph(ep, qp)

    def test_empty_quality_file_rejected(self, tmp_path):
        ep = tmp_path / "e.txt"
        qp = tmp_path / "q.txt"
        ep.write_text("0 1\n")
        qp.write_text("")
        with pytest.raises(GraphParseError):
            load_graph(ep, qp)

    def test_comments_and_isolated_nodes(self, tmp_path):
        ep = tmp_path / "e.txt"
        qp = tmp_path / "q.txt"
        ep.write_text("# edges\n0 1\n")
        qp.write_text("0 1\n1 1\n2 3  # isolated node\n")
        net = load_graph(ep, qp)
        assert net.n == 3
        assert net.degrees[2] == 0

    def test_malformed_edge_line(self, tmp_path):
        ep = tmp_path / "e.txt"
        qp = tmp_path / "q.txt"
        ep.write_text("0 1 2\n")
        qp.write_text("0 0\n")
        with pytest.raises(GraphParseError, match="line 1"):
            load_graph(ep, qp)


class TestEmpiricalReport:
    def _net(self, tmp_path, edges, qualities):
        ep = tmp_path / "e.txt"
        qp = tmp_path / "q.txt"
        ep.write_text("".join(f"{u} {v}\n" for u, v in edges))
        qp.write_text("".join(f"{i} {q}\n" for i, q in enumerate(qualities)))
        return load_graph(ep, qp)

    def test_star_graph(self, tmp_path):
        net = self._net(tmp_path, [(0, i) for i in range(1, 11)], [1] * 11)
        rep = empirical_report(net, include_flags=True)
        assert rep.frac_degree_mean == pytest.approx(10.0 / 11.0)
        assert not rep.flags["degree_mean"][0]  # hub not flagged
        assert rep.flags["degree_mean"][1:].all()

    def test_triangle_with_one_high_quality(self, tmp_path):
        net = self._net(tmp_path, [(0, 1), (1, 2), (2, 0)], [0, 0, 5])
        rep = empirical_report(net)
        assert rep.frac_quality_mean == pytest.approx(2.0 / 3.0)
        # the lower median of {0, 5} is 0 and the inequality is strict
        assert rep.frac_quality_median == 0.0

    def test_equal_qualities_no_quality_paradox(self, tmp_path):
        net = self._net(tmp_path, [(0, 1), (1, 2), (2, 3)], [2, 2, 2, 2])
        rep = empirical_report(net)
        assert rep.frac_quality_mean == 0.0
        assert rep.frac_quality_median == 0.0

    def test_isolated_excluded_and_counted(self, tmp_path):
        net = self._net(tmp_path, [(0, 1)], [0, 1, 3])
        rep = empirical_report(net)
        assert rep.isolated == 1
        assert rep.frac_quality_mean == pytest.approx(0.5)  # node 0 only


class TestJointHistogram:
    def test_three_clique(self, tmp_path):
        ep = tmp_path / "e.txt"
        qp = tmp_path / "q.txt"
        ep.write_text("0 1\n1 2\n2 0\n")
        qp.write_text("0 1\n1 1\n2 1\n")
        net = load_graph(ep, qp)
        hist = joint_histogram(net)
        assert hist == {(2, 1): 1.0}

    def test_sums_to_one(self):
        net = grow_qpa(3000, small_params(2), seed=11)
        hist = joint_histogram(net)
        assert sum(hist.values()) == pytest.approx(1.0, abs=1e-12)

    def test_ba_low_degree_mass(self):
        # the stationary fraction of degree-2 nodes in a beta=2
        # degree-driven network is 1/2
        params = ModelParams(beta=2, quality=make_bernoulli(1.0, 8))
        vals = []
        for seed in (0, 1):
            net = grow_qpa(200_000, params, seed)
            vals.append(joint_histogram(net).get((2, 0), 0.0))
        assert np.mean(vals) == pytest.approx(0.5, abs=0.01)


class TestQpaVsUniformCorrelation:
    def test_quality_correlation_discrimination(self):
        # neighbors of quality-0 nodes: the growth rule ties their mean
        # quality away from the population mean; uniform attachment does not
        params = ModelParams(beta=2, quality=make_bernoulli(0.5, 8))
        mu = params.quality.mean
        qpa_devs, uni_devs = [], []
        for seed in range(10):
            for grow, acc in ((grow_qpa, qpa_devs), (grow_uniform, uni_devs)):
                net = grow(100_000, params, seed)
                deg, qual = net.degrees, net.qualities
                owner = np.repeat(np.arange(net.n), deg)
                nbq = qual[net.adj_indices].astype(float)
                sums = np.bincount(owner, weights=nbq, minlength=net.n)
                pernode = sums / np.maximum(deg, 1)
                acc.append(pernode[qual == 0].mean())
        qpa_devs = np.array(qpa_devs)
        uni_devs = np.array(uni_devs)
        qpa_t = abs(qpa_devs.mean() - mu) / (qpa_devs.std(ddof=1) / np.sqrt(10))
        uni_t = abs(uni_devs.mean() - mu) / (uni_devs.std(ddof=1) / np.sqrt(10))
        assert qpa_t > 3.0
        assert uni_t < 3.0
