import pytest

from core.errors import DomainError
from core.lattice import RankProfile, rank_profile
from core.locus import Verdict, classify
from core.witnesses import (
    FIXTURES,
    WitnessRecord,
    apply_operation,
    base_target,
    construct_witness,
    decompositions,
    predicted_profile,
    verify,
)
from core.words import format_word, parse_word


@pytest.mark.parametrize("key", sorted(FIXTURES))
def test_fixture_witnesses_verify(key):
    assert verify(FIXTURES[key]).verified


def test_verify_rejects_wrong_profile():
    record = WitnessRecord(RankProfile(1, 1, 1, 0), (parse_word("x1"),), (parse_word("x1"),))
    assert not verify(record).verified


def test_store_roundtrip(witness_store):
    record = verify(FIXTURES[(2, 2, 2, 1)])
    witness_store.append(record)
    found = witness_store.lookup(RankProfile(2, 2, 2, 1))
    assert found is not None
    assert found.verified and found.provenance == "fixture"
    assert [format_word(w) for w in found.H_gens] == ["x1", "x2x1X2"]
    assert witness_store.profiles() == {(2, 2, 2, 1)}
    assert witness_store.lookup(RankProfile(2, 2, 2, 2)) is None


def test_store_rejects_unverified(witness_store):
    with pytest.raises(DomainError):
        witness_store.append(FIXTURES[(2, 2, 2, 2)])


def test_store_file_is_tab_separated(witness_store):
    witness_store.append(verify(FIXTURES[(1, 1, 2, 0)]))
    witness_store.append(verify(FIXTURES[(2, 2, 2, 2)]))
    lines = witness_store.path.read_text().splitlines()
    assert lines[0] == "h\tk\tv\tc\tH_words\tK_words\tprovenance\tverified"
    assert lines[2] == "2\t2\t2\t2\tx1;x2\tx1;x2\tfixture\ttrue"


def test_operations_shift_the_profile():
    base = verify(FIXTURES[(2, 2, 2, 1)])
    assert apply_operation(base, "Ia").profile == RankProfile(3, 2, 3, 1)
    assert apply_operation(base, "Ib").profile == RankProfile(2, 3, 3, 1)
    grown = apply_operation(base, "II")
    assert grown.profile == RankProfile(3, 3, 3, 2)
    assert grown.provenance == "II"
    assert rank_profile(grown.H_gens, grown.K_gens) == grown.profile


def test_operation_errors():
    with pytest.raises(DomainError):
        predicted_profile(RankProfile(2, 2, 2, 1), "III")
    with pytest.raises(DomainError):
        apply_operation(FIXTURES[(2, 2, 2, 1)], "Ia")


def test_base_target_is_a_base_row():
    target = base_target(RankProfile(4, 5, 5, 3))
    assert target.v == 2 and target.c == 3
    assert target.h + target.k - target.v == 4


def test_decompositions_fewest_operations_first():
    found = list(decompositions(RankProfile(3, 3, 4, 2)))
    assert all(a + b + g >= 1 for _, a, b, g in found)
    assert RankProfile(3, 3, 4, 2) not in [base for base, *_ in found]
    assert found[0] == (RankProfile(2, 2, 3, 1), 0, 0, 1)
    assert (RankProfile(2, 2, 2, 2), 1, 1, 0) in found
    assert sum(a + b + g for _, a, b, g in found[:3]) == 3


def test_construct_witness_replays_from_fixture(witness_store):
    record = construct_witness(RankProfile(3, 3, 4, 2), witness_store)
    assert record.verified
    assert record.profile == RankProfile(3, 3, 4, 2)
    assert rank_profile(record.H_gens, record.K_gens) == record.profile
    assert witness_store.lookup(RankProfile(3, 3, 4, 2)) is not None


def test_construct_witness_swaps_order():
    record = construct_witness(RankProfile(3, 2, 3, 2))
    assert record.profile == RankProfile(3, 2, 3, 2)
    assert rank_profile(record.H_gens, record.K_gens) == record.profile


def test_construct_witness_refuses_nonrealizable():
    with pytest.raises(DomainError):
        construct_witness(RankProfile(4, 4, 5, 4))


def test_rank2_embedding_keeps_the_profile():
    record = verify(FIXTURES[(2, 2, 2, 1)]).rank2()
    assert rank_profile(record.H_gens, record.K_gens) == record.profile
    assert all(set(format_word(w).lower()) <= {"x", "y"} for w in record.H_gens)


def test_render_lists_generators():
    text = verify(FIXTURES[(1, 1, 2, 0)]).render()
    assert text == "profile (1,1;2,0)\nprovenance fixture\nverified true\nH x1\nK x2\n"


@pytest.mark.slow
def test_every_realizable_profile_gets_a_witness(witness_store):
    for h in range(2, 6):
        for k in range(h, 8 - h):
            for v in range(2, h + k + 1):
                for c in range(0, (h - 1) * (k - 1) + 2):
                    p = RankProfile(h, k, v, c)
                    if classify(p).verdict is not Verdict.REALIZABLE:
                        continue
                    record = construct_witness(p, witness_store, budget=50000)
                    assert rank_profile(record.H_gens, record.K_gens) == p
