import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evoform.codec import (
    BinaryOp,
    CodecConfig,
    Genome,
    SearchSpace,
    UnaryOp,
    bits_to_hex,
    decode,
    encode,
    genome_from_hex,
    genome_to_hex,
    hex_to_bits,
    random_genome,
)
from evoform.errors import BitLengthError, InvalidSpaceError

D3 = CodecConfig(3)


class TestConfig:
    def test_derived_counts_d3(self):
        assert D3.internal_count == 7
        assert D3.node_count == 15
        assert D3.leaf_count == 8
        assert D3.total_bits == 139

    @pytest.mark.parametrize("depth", range(1, 7))
    def test_total_bits_formula(self, depth):
        cfg = CodecConfig(depth)
        internal = 2 ** depth - 1
        nodes = 2 ** (depth + 1) - 1
        leaves = 2 ** depth
        assert cfg.internal_count == internal
        assert cfg.node_count == nodes
        assert cfg.total_bits == 7 + 2 * internal + 2 * nodes + 11 * leaves

    @pytest.mark.parametrize("depth", range(1, 7))
    def test_heap_indexing_covers_children(self, depth):
        cfg = CodecConfig(depth)
        for i in range(cfg.internal_count):
            assert 2 * i + 1 < cfg.node_count
            assert 2 * i + 2 < cfg.node_count

    def test_depth_zero_rejected(self):
        with pytest.raises(ValueError):
            CodecConfig(0)


class TestDecode:
    def test_all_zeros(self):
        g = decode("0" * 139, D3)
        assert g.channel_mask == 0  # raw empty mask preserved
        assert g.variable_mask == 0
        assert all(op == BinaryOp.ADD for op in g.binary_ops)
        assert all(op == UnaryOp.IDENTITY for op in g.unary_ops)
        assert all(leaf == (0, 0) for leaf in g.leaves)

    def test_header_bits(self):
        bits = "001" + "1001" + "0" * 132
        g = decode(bits, D3)
        assert g.channel_mask == 0b001  # {x}
        assert g.variable_mask == 0b1001  # {x, t}
        space = g.effective_space()
        assert space.channels == ("x",)
        assert space.variables == ("x", "t")

    def test_wrong_length(self):
        with pytest.raises(BitLengthError):
            decode("0" * 138, D3)
        with pytest.raises(BitLengthError):
            decode("0" * 140, D3)

    def test_non_binary_characters(self):
        with pytest.raises(BitLengthError):
            decode("2" * 139, D3)


class TestEncode:
    def test_binary_op_field_layout(self):
        g = decode("0" * 139, D3)
        g = Genome(D3, g.channel_mask, g.variable_mask,
                   (1, 0, 0, 0, 0, 0, 0), g.unary_ops, g.leaves)
        bits = encode(g)
        assert bits[7:13] == "010000"

    def test_encode_length(self):
        g = random_genome(D3, 42, SearchSpace.from_names("x", "xt"))
        assert len(encode(g)) == 139

    def test_roundtrip_10k_seeded(self):
        rng = random.Random(20140825)
        for _ in range(10_000):
            bits = format(rng.getrandbits(139), "0139b")
            assert encode(decode(bits, D3)) == bits

    @settings(max_examples=200)
    @given(st.integers(min_value=0, max_value=2 ** 139 - 1))
    def test_roundtrip_property(self, value):
        bits = format(value, "0139b")
        assert encode(decode(bits, D3)) == bits

    @settings(max_examples=50)
    @given(st.integers(min_value=1, max_value=5), st.randoms(use_true_random=False))
    def test_roundtrip_other_depths(self, depth, rng):
        cfg = CodecConfig(depth)
        bits = format(rng.getrandbits(cfg.total_bits), f"0{cfg.total_bits}b")
        assert encode(decode(bits, cfg)) == bits


class TestHexWire:
    def test_width(self):
        assert D3.hex_digits == 35

    def test_roundtrip(self):
        bits = format(random.Random(7).getrandbits(139), "0139b")
        assert hex_to_bits(bits_to_hex(bits, D3), D3) == bits

    def test_genome_roundtrip(self):
        g = random_genome(D3, 3, SearchSpace.from_names("xz", "xyzt"))
        assert genome_from_hex(genome_to_hex(g), D3) == g

    def test_hex_is_lowercase_and_padded(self):
        h = bits_to_hex("0" * 138 + "1", D3)
        assert h == "0" * 34 + "1"
        assert h == h.lower()

    def test_bad_hex(self):
        with pytest.raises(BitLengthError):
            hex_to_bits("zz" + "0" * 33, D3)
        with pytest.raises(BitLengthError):
            hex_to_bits("0" * 34, D3)
        with pytest.raises(BitLengthError):
            hex_to_bits("f" * 35, D3)  # value wider than 139 bits


class TestRandomGenome:
    def test_header_forced_by_space(self):
        space = SearchSpace.from_names("x", "xt")
        for seed in range(50):
            g = random_genome(D3, seed, space)
            assert g.channel_mask == space.channel_mask
            assert g.variable_mask == space.variable_mask

    def test_deterministic(self):
        space = SearchSpace.from_names("xy", "xyt")
        assert random_genome(D3, 99, space) == random_genome(D3, 99, space)
        assert random_genome(D3, 99, space) != random_genome(D3, 100, space)

    def test_empty_space_rejected(self):
        with pytest.raises(InvalidSpaceError):
            SearchSpace(0, 1)
        with pytest.raises(InvalidSpaceError):
            SearchSpace(1, 0)

    def test_binary_op_code_frequencies(self):
        # 1000 genomes x 7 codes; uniform bits put each code near 1/4
        space = SearchSpace.from_names("x", "x")
        counts = [0, 0, 0, 0]
        for seed in range(1000):
            for op in random_genome(D3, seed, space).binary_ops:
                counts[op] += 1
        total = sum(counts)
        for c in counts:
            assert 0.20 <= c / total <= 0.30


class TestSearchSpace:
    def test_union(self):
        a = SearchSpace.from_names("x", "xt")
        b = SearchSpace.from_names("y", "yt")
        u = a.union(b)
        assert u.channels == ("x", "y")
        assert u.variables == ("x", "y", "t")

    def test_contains(self):
        big = SearchSpace.from_names("xyz", "xyzt")
        small = SearchSpace.from_names("x", "xt")
        assert big.contains(small)
        assert not small.contains(big)
