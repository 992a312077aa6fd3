import pytest

from core.errors import DomainError
from core.lattice import RankProfile
from core.locus import (
    Verdict,
    a_closed_form,
    a_sequence,
    best_schedule_sequence,
    classify,
    locus_table,
    monotone_schedules,
    optimal_schedule,
    schedule_sequence,
    spanning_budget_maximizers,
)


def test_a_sequence_known_values():
    assert a_sequence(5, 7) == [0, 1, 2, 3, 5, 7, 10, 13, 17, 21, 25]
    assert a_sequence(2, 2) == [0, 1, 2]


def test_a_sequence_is_symmetric_in_h_and_k():
    assert a_sequence(10, 2) == a_sequence(2, 10)


def test_a_sequence_quadratic_part():
    seq = a_sequence(6, 9)
    for i in range(1, 2 * (6 - 1) + 1):
        assert seq[i] == a_closed_form(i)


def test_a_sequence_needs_h_at_least_two():
    with pytest.raises(DomainError):
        a_sequence(1, 4)


@pytest.mark.parametrize("h,k", [(2, 2), (3, 3), (3, 5), (4, 6), (5, 7)])
def test_best_schedule_matches_a_sequence(h, k):
    assert best_schedule_sequence(h, k) == a_sequence(h, k)
    page, seq = schedule_sequence(optimal_schedule(h, k))
    assert page == (h, k)
    assert seq == a_sequence(h, k)


def test_monotone_schedule_count():
    assert len(list(monotone_schedules(4, 5))) == 10


def test_schedule_rejects_unknown_step():
    with pytest.raises(DomainError):
        schedule_sequence(["Ia", "II"])


def test_classify_first_rule_wins():
    result = classify(RankProfile(4, 4, 5, 4))
    assert result.verdict is Verdict.NONREALIZABLE
    assert str(result) == "NONREALIZABLE rule=R4"
    assert result.cell() == "N:R4"


def test_classify_hanna_neumann_and_hopfian():
    assert classify(RankProfile(2, 2, 2, 3)).rule == "R1"
    assert classify(RankProfile(2, 2, 4, 1)).rule == "R2"
    assert classify(RankProfile(3, 4, 7, 0)).verdict is Verdict.REALIZABLE


def test_classify_realizable_by_schedule():
    result = classify(RankProfile(6, 6, 7, 6))
    assert result.verdict is Verdict.REALIZABLE
    assert result.rule == "R6"


@pytest.mark.parametrize("k", range(2, 11))
def test_rank_two_rows_follow_the_linear_predicate(k):
    for v in range(2, 2 + k + 1):
        for c in range(0, k + 1):
            expected = Verdict.REALIZABLE if c + v <= k + 2 else Verdict.NONREALIZABLE
            assert classify(RankProfile(2, k, v, c)).verdict is expected


@pytest.mark.parametrize("i", range(3, 8))
def test_gap_value_is_never_attained(i):
    h = k = 8
    c = i * (i - 1) // 2 + 1
    result = classify(RankProfile(h, k, h + k - i, c))
    assert result.verdict is Verdict.NONREALIZABLE
    assert result.rule == "R4"


def test_classify_swaps_to_canonical_order():
    assert classify(RankProfile(5, 3, 6, 2)).profile == RankProfile(3, 5, 6, 2)


def test_classify_unknown_cells():
    plain = classify(RankProfile(4, 4, 4, 6))
    assert plain.verdict is Verdict.UNKNOWN
    assert plain.rule is None
    assert plain.cell() == "U"
    assert not plain.ivanov_open_question
    assert plain.note
    top = classify(RankProfile(4, 4, 3, 10))
    assert top.verdict is Verdict.UNKNOWN
    assert top.ivanov_open_question
    assert str(top) == "UNKNOWN ivanov-question"


def test_classify_range_errors():
    with pytest.raises(DomainError):
        classify(RankProfile(1, 3, 3, 1))
    with pytest.raises(DomainError):
        classify(RankProfile(3, 3, 7, 0))


def test_locus_page_two_two_csv():
    assert locus_table(2, 2).to_csv() == (
        "v\\c,0,1,2\n"
        "4,R:R5,N:R2,N:R2\n"
        "3,R:R5,R:R5,N:R3\n"
        "2,R:R5,R:R5,R:R5\n"
    )


def test_locus_ascii_and_counts():
    table = locus_table(3, 4)
    assert table.to_ascii().startswith("page (h,k)=(3,4)\n")
    total = sum(table.count(v) for v in Verdict)
    assert total == len(table.v_range) * len(table.c_range)
    assert table.boundary()[7] == 0


def test_locus_marks_witnessed_cells(witness_store):
    from core.witnesses import FIXTURES, verify

    for record in FIXTURES.values():
        witness_store.append(verify(record))
    table = locus_table(2, 2, witness_store)
    assert table.cell_text(2, 2) == "R:R5+"
    assert table.cell_text(4, 1) == "N:R2"


def test_spanning_budget_maximizers():
    best, winners = spanning_budget_maximizers(2)
    assert best == 6
    assert winners == [[(2, 3)], [(3, 2)]]
    assert spanning_budget_maximizers(3)[0] == 12


def test_spanning_budget_maximizer_is_unique_for_budget_six():
    best, winners = spanning_budget_maximizers(3)
    assert best == 12
    assert winners == [[(3, 4)], [(4, 3)]]


@pytest.mark.parametrize("h,k", [(2, 2), (2, 5), (3, 3), (3, 5), (4, 4), (4, 6)])
def test_nonrealizable_cells_stay_nonrealizable_as_c_grows(h, k):
    top = (h - 1) * (k - 1) + 3
    for v in range(2, h + k + 1):
        for c in range(0, top):
            first = classify(RankProfile(h, k, v, c))
            if first.rule not in ("R1", "R3", "R5") or first.verdict is not Verdict.NONREALIZABLE:
                continue
            for later in range(c + 1, top + 1):
                result = classify(RankProfile(h, k, v, later))
                assert result.verdict is Verdict.NONREALIZABLE, (v, c, later)
                assert result.rule <= first.rule, (v, c, later, result.rule)


def test_page_five_seven_boundary_is_the_reversed_sequence():
    table = locus_table(5, 7)
    boundary = table.boundary()
    assert [boundary[v] for v in table.v_range] == list(reversed(a_sequence(5, 7)))


def test_page_four_four_gap_cell():
    assert locus_table(4, 4).cell_text(5, 4) == "N:R4"
