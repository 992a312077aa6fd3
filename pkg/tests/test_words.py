import pytest

from core.errors import DomainError, LexicalError
from core.words import (
    ABC,
    Alphabet,
    EMPTY,
    XY,
    concat,
    cyclically_reduce,
    format_word,
    invert,
    parse_subgroup_text,
    parse_word,
    power,
    rank2_embed,
    reduced_words,
    theta_embed,
)


def test_parse_uppercase_is_inverse():
    w = parse_word("x1X2")
    assert w.syllables == (("x1", 1), ("x2", -1))
    assert format_word(w) == "x1X2"


def test_parse_reduces_freely():
    assert parse_word("aAbB") == EMPTY
    assert format_word(parse_word("abBc")) == "ac"


def test_unknown_character_reports_position():
    with pytest.raises(LexicalError) as info:
        parse_word("ab-c")
    assert info.value.char == "-"
    assert info.value.position == 2


def test_letter_outside_declared_alphabet():
    with pytest.raises(LexicalError):
        parse_word("abd", ABC)


def test_invert_and_concat():
    w = parse_word("cBcAbC")
    assert concat(w, invert(w)) == EMPTY
    assert format_word(invert(w)) == "cBaCbC"
    assert format_word(power(parse_word("ab"), -2)) == "BABA"


def test_cyclic_reduction():
    assert format_word(cyclically_reduce(parse_word("abcA"))) == "bc"


def test_theta_embedding():
    assert format_word(theta_embed(parse_word("x"), XY)) == "cA"
    assert format_word(theta_embed(parse_word("xy"), XY)) == "cAcB"
    assert format_word(theta_embed(parse_word("Y"), XY)) == "bC"


def test_theta_embedding_is_injective_on_short_words():
    words = list(reduced_words(XY, 6))
    assert len(words) == 1 + 4 + 12 + 36 + 108 + 324 + 972
    images = {theta_embed(w, XY) for w in words}
    assert len(images) == len(words)
    assert all(not theta_embed(w, XY).is_empty() for w in words if not w.is_empty())


def test_theta_rejects_three_letter_domain():
    with pytest.raises(DomainError):
        theta_embed(parse_word("a"), ABC)


def test_rank2_embedding():
    assert format_word(rank2_embed(parse_word("x1"))) == "Yxy"
    assert format_word(rank2_embed(parse_word("x2X1"))) == "YYxyXy"


def test_alphabet_fresh_letter_and_infer():
    alphabet = Alphabet.indexed(2)
    assert alphabet.letters == ("x1", "x2")
    assert alphabet.fresh_letter() == "x3"
    inferred = Alphabet.infer([parse_word("x10x2"), parse_word("x1")])
    assert inferred.letters == ("x1", "x2", "x10")


def test_alphabet_rejects_duplicates():
    with pytest.raises(DomainError):
        Alphabet(("a", "a"))


def test_subgroup_text_with_header_and_comments():
    alphabet, words = parse_subgroup_text("# H\nalphabet: a b c\ncA\n\ncBcAbC\n")
    assert alphabet == ABC
    assert [format_word(w) for w in words] == ["cA", "cBcAbC"]


def test_reduced_words_count():
    # 2n(2n-1)^(L-1) reduced words of length L over n letters
    words = [w for w in reduced_words(XY, 3) if len(w) == 3]
    assert len(words) == 4 * 3 * 3
