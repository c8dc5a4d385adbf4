import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lognf import BUFFERED, METERED, BadIndex, parse_word, run
from lognf.lang import UT
from lognf.nf.nilpotent import UTNF, ut_entry_bound_check, ut_nf, ut_token
from lognf.oracles import UTOracle


def w(text, r=3):
    return parse_word(text, UT(r).alphabet)


def test_commutator():
    assert ut_nf(w("e.1.2 e.2.3 e.1.2^-1 e.2.3^-1"), 3) == ("e.1.3",)


def test_product_absorbs_the_corner_entry():
    assert ut_nf((), 3) == ()
    assert ut_nf(w("e.1.2 e.2.3"), 3) == ("e.1.2", "e.2.3")


def test_ut4_frozen_example():
    word = w("e.3.4 e.2.3 e.1.2 e.3.4^-1", 4)
    out = ut_nf(word, 4)
    assert out == w("e.1.2 e.2.3 e.1.3^-1 e.2.4^-1 e.1.4", 4)
    assert UTOracle(4).value(out) == UTOracle(4).value(word)


def test_entry_bound_examples():
    for x in UT(4).alphabet.letters:
        assert ut_entry_bound_check((x,), 4)
    assert ut_entry_bound_check(w("e.1.2 e.2.3"), 3)
    rng = random.Random(100)
    word = tuple(rng.choice(UT(4).alphabet.letters) for _ in range(100))
    assert ut_entry_bound_check(word, 4)


def test_bound_is_tight_for_powers():
    # (E_12 E_23)^n has corner entry n(n+1)/2 <= (2n)^2
    word = ("e.1.2", "e.2.3") * 30
    m = UTOracle(3).value(word)
    assert m[0][2] == 30 * 31 // 2
    assert ut_entry_bound_check(word, 3)


def test_tokens():
    assert ut_token(1, 3, 3) == "e.1.3"
    for bad in [(2, 2, 3), (3, 1, 3), (1, 4, 3), (0, 2, 3)]:
        with pytest.raises(BadIndex):
            ut_token(*bad)
    with pytest.raises(BadIndex):
        UTNF(9)


@pytest.mark.parametrize("r", [2, 3, 4, 5])
@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_value_kept_and_idempotent(r, data):
    word = data.draw(st.lists(st.sampled_from(UT(r).alphabet.letters), max_size=40))
    out = ut_nf(word, r)
    assert UTOracle(r).value(out) == UTOracle(r).value(word)
    assert ut_nf(out, r) == out


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from(UT(4).alphabet.letters), max_size=40))
def test_modes_agree(word):
    f = UTNF(4)
    assert run(f, word, mode=METERED)[0] == run(f, word, mode=BUFFERED)[0]


def test_letters_appear_by_superdiagonal():
    word = w("e.2.3 e.1.3 e.1.2 e.3.4 e.1.4 e.2.4", 4)
    out = ut_nf(word, 4)
    order = ["e.1.2", "e.2.3", "e.3.4", "e.1.3", "e.2.4", "e.1.4"]
    ranks = [order.index(x.replace("^-1", "")) for x in out]
    assert ranks == sorted(ranks)
