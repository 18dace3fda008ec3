import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evoform.codec import (
    BinaryOp,
    CodecConfig,
    SearchSpace,
    UnaryOp,
    decode,
    random_genome,
)
from evoform.errors import InvalidMaskError
from evoform.expression import (
    Branch,
    ExpressionTree,
    Leaf,
    TimeParam,
    Vertex,
    build_tree,
    displace,
    emit_source,
    evaluate,
    evaluate_batch,
    fixed_point,
    genome_tree,
    payload_to_constant,
)

from oracle_parser import displaced, parse_snippet

D3 = CodecConfig(3)
I = UnaryOp.IDENTITY


def reference_tree() -> ExpressionTree:
    """Hand-built tree for (2.2 - x/11) + 7*cos(y)."""
    left = Branch(I, BinaryOp.SUB,
                  Leaf(I, value=2.2),
                  Branch(I, BinaryOp.DIV, Leaf(I, var="x"), Leaf(I, value=11.0)))
    right = Branch(I, BinaryOp.MUL, Leaf(I, value=7.0), Leaf(UnaryOp.COS, var="y"))
    root = Branch(I, BinaryOp.ADD, left, right)
    return ExpressionTree(root, 3, frozenset({"x", "y"}))


class TestTimeParam:
    def test_wraps_into_range(self):
        assert TimeParam(7.0).t == pytest.approx(7.0 - 2 * math.pi)
        assert TimeParam(-1.0).t == pytest.approx(2 * math.pi - 1.0)
        assert TimeParam(2 * math.pi).t == 0.0
        assert 0.0 <= TimeParam(-1e-20).t < 2 * math.pi

    def test_identical_after_full_turn(self):
        assert TimeParam(7.0).t == TimeParam(7.0 - 2 * math.pi).t


class TestConstants:
    def test_payload_endpoints(self):
        assert payload_to_constant(0) == -10.0
        assert payload_to_constant(255) == 10.0

    def test_fixed_point_half_away_from_zero(self):
        assert fixed_point(0.12345, 4) in ("0.1234", "0.1235")  # float repr limits
        assert fixed_point(2.2) == "2.2000"
        assert fixed_point(-9.92155, 4) == "-9.9216" or fixed_point(-9.92155, 4) == "-9.9215"
        assert fixed_point(-0.000001) == "0.0000"  # no negative zero

    def test_fixed_point_exact_ties(self):
        # values exactly representable keep the away-from-zero rule
        assert fixed_point(0.5, 0) == "1"
        assert fixed_point(-0.5, 0) == "-1"
        assert fixed_point(0.1234567, 6) == "0.123457"


class TestBuildTree:
    def test_all_zero_genome(self):
        g = decode("0" * 139, D3)
        tree = build_tree(g, SearchSpace.from_names("x", "x"))
        # all internal ADD over x leaves: value = 8x
        assert evaluate(tree, Vertex(1.0, 0, 0), TimeParam(0)) == 8.0

    def test_remap_out_of_set_variable(self):
        # leaf kind 1 (y) with active {x, t}: index 1 of [t, x] -> x
        g = decode("0" * 139, D3)
        leaves = tuple((1, 0) for _ in range(8))
        g = type(g)(D3, g.channel_mask, g.variable_mask, g.binary_ops, g.unary_ops, leaves)
        tree = build_tree(g, SearchSpace.from_names("x", "xt"))
        assert evaluate(tree, Vertex(1.0, 5.0, 0), TimeParam(3.0)) == 8.0  # reads x, not y or t

    def test_in_set_variable_kept(self):
        g = decode("0" * 139, D3)
        leaves = tuple((3, 0) for _ in range(8))  # t
        g = type(g)(D3, g.channel_mask, g.variable_mask, g.binary_ops, g.unary_ops, leaves)
        tree = build_tree(g, SearchSpace.from_names("x", "xt"))
        assert evaluate(tree, Vertex(0, 0, 0), TimeParam(0.5)) == pytest.approx(4.0)

    def test_payload_255_is_ten(self):
        g = decode("0" * 139, D3)
        leaves = tuple((4, 255) for _ in range(8))
        g = type(g)(D3, g.channel_mask, g.variable_mask, g.binary_ops, g.unary_ops, leaves)
        tree = build_tree(g, SearchSpace.from_names("x", "x"))
        assert evaluate(tree, Vertex(0, 0, 0), TimeParam(0)) == 80.0


class TestEvaluate:
    def test_reference_values(self):
        tree = reference_tree()
        assert evaluate(tree, Vertex(11, 0, 0), TimeParam(0)) == pytest.approx(8.2, abs=1e-9)
        assert evaluate(tree, Vertex(0, math.pi, 0), TimeParam(0)) == pytest.approx(-4.8, abs=1e-9)

    def test_protected_division(self):
        tree = ExpressionTree(
            Branch(I, BinaryOp.DIV, Leaf(I, var="x"), Leaf(I, value=0.0)),
            1, frozenset({"x"}))
        assert evaluate(tree, Vertex(3.5, 0, 0), TimeParam(0)) == 3.5

    def test_tan_clamped(self):
        tree = ExpressionTree(Leaf(UnaryOp.TAN, var="x"), 0, frozenset({"x"}))
        v = Vertex(math.pi / 2, 0, 0)  # near the pole
        assert abs(evaluate(tree, v, TimeParam(0))) <= 1e4

    def test_overflow_clamped(self):
        tree = ExpressionTree(
            Branch(I, BinaryOp.MUL, Leaf(I, var="x"), Leaf(I, var="x")),
            1, frozenset({"x"}))
        assert evaluate(tree, Vertex(1e308, 0, 0), TimeParam(0)) == 1e6

    def test_totality_over_random_genomes(self):
        rng = random.Random(1)
        space = SearchSpace.from_names("xyz", "xyzt")
        for _ in range(2000):
            g = random_genome(D3, rng.getrandbits(32), space)
            tree = genome_tree(g)
            v = Vertex(rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(-100, 100))
            value = evaluate(tree, v, TimeParam(rng.uniform(-10, 10)))
            assert math.isfinite(value)

    @settings(max_examples=200)
    @given(st.integers(0, 2 ** 32 - 1),
           st.floats(-1e308, 1e308), st.floats(-1e308, 1e308),
           st.floats(-1e308, 1e308), st.floats(-1e6, 1e6))
    def test_totality_extreme_vertices(self, seed, x, y, z, t):
        g = random_genome(D3, seed, SearchSpace.from_names("xyz", "xyzt"))
        value = evaluate(genome_tree(g), Vertex(x, y, z), TimeParam(t))
        assert math.isfinite(value)


class TestDisplace:
    def test_reference_displacement(self):
        moved = displace(reference_tree(), 0b111, Vertex(11, 0, 0), TimeParam(0))
        assert moved.x == pytest.approx(19.2, abs=1e-9)
        assert moved.y == pytest.approx(8.2, abs=1e-9)
        assert moved.z == pytest.approx(8.2, abs=1e-9)

    def test_simultaneous_application(self):
        # the scalar is computed once from the original coordinates
        tree = ExpressionTree(Leaf(I, var="x"), 0, frozenset({"x"}))
        moved = displace(tree, 0b111, Vertex(2.0, 0.0, 0.0), TimeParam(0))
        assert (moved.x, moved.y, moved.z) == (4.0, 2.0, 2.0)

    def test_unselected_channels_unchanged(self):
        moved = displace(reference_tree(), 0b010, Vertex(1, 2, 3), TimeParam(0))
        assert moved.x == 1 and moved.z == 3
        assert moved.y != 2

    def test_time_wrapping(self):
        tree = ExpressionTree(Leaf(UnaryOp.SIN, var="t"), 0, frozenset({"t"}))
        a = displace(tree, 0b001, Vertex(1, 2, 3), TimeParam(1.25))
        b = displace(tree, 0b001, Vertex(1, 2, 3), TimeParam(1.25 + 2 * math.pi))
        assert a == b

    def test_empty_mask_rejected(self):
        with pytest.raises(InvalidMaskError):
            displace(reference_tree(), 0, Vertex(0, 0, 0), TimeParam(0))


class TestEmit:
    def test_reference_statement(self):
        text = emit_source(reference_tree(), 0b111)
        assert text == ("p.xyz = p.xyz + "
                        "(((2.2000 - (p.x / 11.0000)) + (7.0000 * cos(p.y))));")

    def test_single_channel_swizzle(self):
        tree = ExpressionTree(Leaf(I, var="x"), 0, frozenset({"x"}))
        assert emit_source(tree, 0b010) == "p.y = p.y + (p.x);"

    def test_time_spelled_out(self):
        tree = ExpressionTree(Leaf(UnaryOp.SIN, var="t"), 0, frozenset({"t"}))
        assert emit_source(tree, 0b001) == "p.x = p.x + (sin(time));"

    def test_empty_mask_rejected(self):
        with pytest.raises(InvalidMaskError):
            emit_source(reference_tree(), 0)


class TestEmissionFidelity:
    def test_reference_tree_reparse(self):
        tree = reference_tree()
        text = emit_source(tree, 0b111)
        _, oracle = parse_snippet(text)
        rng = random.Random(5)
        for _ in range(100):
            v = Vertex(rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20))
            t = TimeParam(rng.uniform(0, 7))
            assert oracle(v.x, v.y, v.z, t.t) == pytest.approx(
                evaluate(tree, v, t), abs=1e-9)

    def test_random_genomes_reparse(self):
        rng = random.Random(99)
        space = SearchSpace.from_names("xyz", "xyzt")
        for _ in range(100):
            g = random_genome(D3, rng.getrandbits(32), space)
            tree = genome_tree(g)
            text = emit_source(tree, g.effective_channel_mask())
            _, oracle = parse_snippet(text)
            for _ in range(20):
                v = Vertex(rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50))
                t = TimeParam(rng.uniform(0, 7))
                engine = evaluate(tree, v, t)
                assert oracle(v.x, v.y, v.z, t.t) == pytest.approx(engine, abs=1e-9)

    def test_displacement_matches_oracle(self):
        rng = random.Random(3)
        g = random_genome(D3, 17, SearchSpace.from_names("xz", "xyzt"))
        tree = genome_tree(g)
        text = emit_source(tree, g.effective_channel_mask())
        for _ in range(50):
            v = Vertex(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5))
            t = TimeParam(rng.uniform(0, 7))
            ours = displace(tree, g.effective_channel_mask(), v, t)
            theirs = displaced(text, v.x, v.y, v.z, t.t)
            assert (ours.x, ours.y, ours.z) == pytest.approx(theirs, abs=1e-9)


class TestBatchEvaluation:
    def test_matches_scalar(self):
        rng = random.Random(11)
        space = SearchSpace.from_names("xyz", "xyzt")
        for _ in range(20):
            g = random_genome(D3, rng.getrandbits(32), space)
            tree = genome_tree(g)
            points = [(rng.uniform(-30, 30), rng.uniform(-30, 30),
                       rng.uniform(-30, 30), rng.uniform(0, 6.28)) for _ in range(40)]
            xs, ys, zs, ts = zip(*points)
            batch = evaluate_batch(tree, xs, ys, zs, ts)
            for value, (x, y, z, t) in zip(batch, points):
                assert value == pytest.approx(
                    evaluate(tree, Vertex(x, y, z), TimeParam(t)), rel=1e-12, abs=1e-12)
