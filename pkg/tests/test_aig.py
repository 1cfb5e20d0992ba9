import random

import pytest

from flowtune import (Aig, GenSpec, MalformedLiteralError, equivalent,
                      gen_random, metrics, simulate)
from flowtune.aig import Objective

from conftest import build_balanced_tree, build_chain


class TestAddAnd:
    def test_annihilator(self):
        g = Aig(1)
        x = g.input_literals()[0]
        assert g.add_and(x, 0) == 0

    def test_neutral_element(self):
        g = Aig(1)
        x = g.input_literals()[0]
        assert g.add_and(x, 1) == x

    def test_idempotence_and_contradiction(self):
        g = Aig(1)
        x = g.input_literals()[0]
        assert g.add_and(x, x) == x
        assert g.add_and(x, x ^ 1) == 0
        assert g.num_ands == 0

    def test_structural_hashing(self):
        g = Aig(2)
        a, b = g.input_literals()
        l1 = g.add_and(a, b)
        l2 = g.add_and(a, b)
        l3 = g.add_and(b, a)  # commuted operands hash identically
        assert l1 == l2 == l3
        assert g.num_ands == 1

    def test_malformed_literal(self):
        g = Aig(1)
        with pytest.raises(MalformedLiteralError):
            g.add_and(2, 99)

    def test_no_duplicate_pairs_after_random_builds(self):
        rng = random.Random(11)
        for _ in range(20):
            g = Aig(4)
            lits = list(g.input_literals())
            for _ in range(60):
                a, b = rng.choice(lits), rng.choice(lits)
                l = g.add_and(a, b ^ (rng.random() < 0.5))
                lits.append(l)
            pairs = {g.fanins(n) for n in g.and_nodes()}
            assert len(pairs) == g.num_ands


class TestMetrics:
    def test_chain(self):
        for k in (1, 3, 7):
            q = metrics(build_chain(k + 1))
            assert q.and_count == k
            assert q.depth == k

    def test_balanced_tree(self):
        q = metrics(build_balanced_tree(8))
        assert q.and_count == 7
        assert q.depth == 3

    def test_output_wired_to_input(self):
        g = Aig(2)
        g.outputs = [g.input_literals()[0]]
        q = metrics(g)
        assert q.and_count == 0
        assert q.depth == 0

    def test_dangling_excluded(self):
        g = Aig(3)
        a, b, c = g.input_literals()
        kept = g.add_and(a, b)
        g.add_and(b, c)  # never referenced by an output
        g.outputs = [kept]
        assert metrics(g).and_count == 1

    def test_objective_values(self):
        g = build_chain(4)
        assert metrics(g, Objective.NODE_COUNT).objective_value == 3
        assert metrics(g, Objective.DEPTH).objective_value == 3
        assert metrics(g, Objective.NODE_DEPTH_PRODUCT).objective_value == 9

    def test_invariant_under_creation_order(self):
        # same DAG built in two different node orders
        g1 = Aig(3)
        a, b, c = g1.input_literals()
        x = g1.add_and(a, b)
        y = g1.add_and(b, c)
        g1.outputs = [g1.add_and(x, y)]

        g2 = Aig(3)
        a, b, c = g2.input_literals()
        y = g2.add_and(b, c)
        x = g2.add_and(a, b)
        g2.outputs = [g2.add_and(x, y)]
        assert metrics(g1) == metrics(g2)


class TestSimulate:
    def test_single_and(self):
        g = Aig(2)
        a, b = g.input_literals()
        g.outputs = [g.add_and(a, b)]
        assert simulate(g, ["0101", "0011"]) == ["0001"]

    def test_inverted_input(self):
        g = Aig(1)
        g.outputs = [g.input_literals()[0] ^ 1]
        assert simulate(g, ["0101"]) == ["1010"]

    def test_empty_width(self):
        g = Aig(1)
        g.outputs = [g.input_literals()[0]]
        assert simulate(g, [""]) == [""]

    def test_width_mismatch(self):
        g = Aig(2)
        a, b = g.input_literals()
        g.outputs = [g.add_and(a, b)]
        with pytest.raises(ValueError):
            simulate(g, ["01", "011"])

    def test_int_patterns(self):
        g = Aig(2)
        a, b = g.input_literals()
        g.outputs = [g.add_and(a, b)]
        assert simulate(g, [0b0101, 0b0011], width=4) == [0b0001]

    def test_block_concatenation_consistency(self):
        # bit-parallel evaluation of a concatenated block equals the
        # concatenation of per-block results
        g = gen_random(GenSpec(6, 50, 3, 5))
        rng = random.Random(3)
        blocks = [[rng.getrandbits(32) for _ in range(6)] for _ in range(3)]
        merged = [b0 | b1 << 32 | b2 << 64
                  for b0, b1, b2 in zip(*blocks)]
        whole = simulate(g, merged, width=96)
        parts = [simulate(g, blk, width=32) for blk in blocks]
        for o in range(3):
            joined = parts[0][o] | parts[1][o] << 32 | parts[2][o] << 64
            assert whole[o] == joined


class TestEquivalence:
    def test_reflexive(self):
        for seed in range(5):
            g = gen_random(GenSpec(8, 80, 4, seed))
            assert equivalent(g, g)

    def test_commutativity(self):
        g1 = Aig(2)
        a, b = g1.input_literals()
        g1.outputs = [g1.add_and(a, b)]
        g2 = Aig(2)
        a, b = g2.input_literals()
        g2.outputs = [g2.add_and(b, a)]
        assert equivalent(g1, g2)

    def test_and_vs_or(self):
        g1 = Aig(2)
        a, b = g1.input_literals()
        g1.outputs = [g1.add_and(a, b)]
        g2 = Aig(2)
        a, b = g2.input_literals()
        g2.outputs = [g2.add_and(a ^ 1, b ^ 1) ^ 1]
        assert not equivalent(g1, g2)

    def test_exhaustive_refused_beyond_16(self):
        g = Aig(17)
        g.outputs = [g.input_literals()[0]]
        with pytest.raises(ValueError):
            equivalent(g, g, "exhaustive")
        assert equivalent(g, g, "random", count=256, seed=9)

    def test_arity_mismatch(self):
        with pytest.raises(ValueError):
            equivalent(Aig(2), Aig(3))


class TestCompact:
    def test_removes_dangling_preserves_function(self):
        g = gen_random(GenSpec(8, 120, 4, 17))
        g.add_and(g.input_literals()[0], g.input_literals()[1] ^ 1)
        c = g.compact()
        assert c.num_ands <= g.num_ands
        assert equivalent(g, c)

    def test_roundtrip_stable(self):
        g = gen_random(GenSpec(8, 120, 4, 18))
        c = g.compact()
        assert c.compact().structurally_equal(c)
