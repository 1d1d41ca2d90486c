import itertools

from densityseek import Bitstream, Ratio, Span, brute_bounded, brute_fixed, verify_span
from densityseek.loglinear import SolverCounters


def test_brute_fixed_examples(s_example):
    assert brute_fixed(s_example, Ratio(3, 5)) == Span(1, 10)
    assert brute_fixed(Bitstream.from_string("111"), Ratio(1, 2)) is None
    assert brute_fixed(Bitstream.from_string("10"), Ratio(1, 2)) == Span(1, 2)
    assert brute_fixed(Bitstream(), Ratio(1, 2)) is None


def test_brute_bounded_examples(s_example, t_example):
    assert brute_bounded(s_example, Ratio(7, 10)) == Span(4, 10)
    assert brute_bounded(t_example, Ratio(3, 5)) == Span(4, 13)
    assert brute_bounded(Bitstream.from_string("0000"), Ratio(1, 2)) is None


def test_brute_handles_trivial_ratios(s_example):
    assert brute_fixed(s_example, Ratio(1, 1)) == Span(4, 5)
    assert brute_bounded(s_example, Ratio(0, 1)) == Span(1, 12)


def test_brute_counts_spans():
    c = SolverCounters()
    brute_fixed(Bitstream.from_string("1111"), Ratio(1, 2), c)
    # lengths 4 and 2 are tried: 1 + 3 windows
    assert c.comparisons == 4


def test_brute_against_direct_enumeration():
    # independent check: enumerate every span by slicing the raw bits
    for n in range(0, 9):
        for bits in itertools.product((0, 1), repeat=n):
            s = Bitstream(bits)
            for r in (Ratio(1, 2), Ratio(1, 3), Ratio(2, 3)):
                for bounded, fn in ((False, brute_fixed), (True, brute_bounded)):
                    best = None
                    for a in range(1, n + 1):
                        for b in range(a, n + 1):
                            ones = sum(bits[a - 1 : b])
                            lhs, rhs = ones * r.beta, r.alpha * (b - a + 1)
                            ok = lhs >= rhs if bounded else lhs == rhs
                            if ok and (best is None or b - a + 1 > best.length):
                                best = Span(a, b)
                    got = fn(s, r)
                    assert got == best
                    if got is not None:
                        assert verify_span(s, r, got, "bounded" if bounded else "fixed")
                        if not bounded:
                            assert got.length % r.beta == 0
