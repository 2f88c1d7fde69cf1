"""Unit tests for pattern families and membership checking."""

import os
import random
from fractions import Fraction

import networkx as nx
import pytest

from orbitile.graph.patch import build_orbit_graph, reduce
from orbitile.orbit.builder import overlay_orbit
from orbitile.substitution.system import make_system
from orbitile.surface.family import (
    FAIL,
    PASS,
    UNKNOWN,
    PatternFamily,
    check_membership,
    collect_pattern_family,
    combined_alphabet,
    load_family,
    mutate_label,
    save_family,
)
from orbitile.surface.pq import decorated_window, pq_substitution
from orbitile.util.exceptions import BadParameters

C, D = Fraction(1, 10), Fraction(1, 20)


@pytest.fixture(scope='module')
def binary_b():
    return make_system('binary', {'0': '00'})


@pytest.fixture(scope='module')
def family(binary_b):
    return collect_pattern_family(5, 5, binary_b, windows=[(C, D)], rows=4, width=160)


@pytest.fixture(scope='module')
def overlay_patch(binary_b):
    window = overlay_orbit(combined_alphabet(5, 5, binary_b), 4, C, D, 160)
    return reduce(build_orbit_graph(window))


class TestCollectPatternFamily:
    """Test cases for collect_pattern_family."""

    def test_collects_patterns(self, family):
        """Test a single overlay window yields some patterns."""
        assert len(family) > 0
        assert family.p == 5 and family.q == 5
        assert family.provenance[0]['c'] == '1/10'
        assert family.provenance[0]['d'] == '1/20'
        assert family.provenance[0]['rejected'] == 0
        assert family.provenance[0]['added'] == len(family)

    def test_commensurate_pair(self):
        """Test a ℬ-system with the same growth rate is rejected."""
        with pytest.raises(BadParameters) as exc_info:
            collect_pattern_family(5, 5, pq_substitution(5, 5), windows=[(C, D)])
        assert str(exc_info.value).startswith('{p,q} = {5,5}: growth rates are commensurate')

    def test_patterns_are_basepointed(self, family):
        """Test every stored pattern has its basepoint in the graph."""
        for pattern in family.patterns:
            assert pattern.basepoint in pattern.graph
            assert len(pattern.faces) == 5


class TestFamilyJson:
    """Test cases for saving pattern families."""

    def test_round_trip(self, family, temp_dir):
        """Test a saved family reloads with the same patterns."""
        path = os.path.join(temp_dir, 'family.json')
        save_family(family, path)
        restored = load_family(path)
        assert len(restored) == len(family)
        assert all(pattern in restored for pattern in family.patterns)
        assert restored.to_json()['under_approximation'] is True
        assert restored.sys_b.alphabet == ('0',)


class TestCheckMembership:
    """Test cases for check_membership."""

    def test_source_window_passes(self, family, overlay_patch):
        """Test the window a family came from passes everywhere."""
        report = check_membership(overlay_patch, family)
        counts = report.counts()
        assert report.ok
        assert counts[PASS] > 0
        assert counts[FAIL] == 0
        assert counts[UNKNOWN] == 0

    def test_empty_family_is_unknown(self, binary_b, overlay_patch):
        """Test patterns missing from the family are UNKNOWN rather than FAIL."""
        empty = PatternFamily(5, 5, binary_b)
        report = check_membership(overlay_patch, empty)
        assert report.ok
        assert report.counts()[PASS] == 0
        assert report.counts()[UNKNOWN] > 0
        assert report.results[0]['reason'] == 'pattern not in the collected family'

    def test_mutation_fails(self, family, overlay_patch):
        """Test changing one label to another letter produces a FAIL."""
        passing = [tuple(item['vertex']) for item in check_membership(overlay_patch, family).results]
        v = passing[len(passing) // 2]
        current = overlay_patch.label(v)
        other = next(
            overlay_patch.label(u) for u in overlay_patch.graph if overlay_patch.label(u).alpha != current.alpha
        )
        mutated = mutate_label(overlay_patch, v, other)
        assert overlay_patch.label(v) == current
        report = check_membership(mutated, family)
        assert not report.ok
        assert report.counts()[FAIL] > 0

    def test_seeded_mutations_fail_nearby(self, family, overlay_patch, binary_b):
        """Test fifty seeded one-letter mutations each leave a FAIL within distance p."""
        ov = combined_alphabet(5, 5, binary_b)
        checked = {tuple(item['vertex']) for item in check_membership(overlay_patch, family).results}
        siblings = {}
        for v in overlay_patch.graph:
            siblings.setdefault((v[0], overlay_patch.parent(v)), []).append(v)
        # children strictly inside their sibling run, with the parent checked as well
        candidates = []
        for v in sorted(checked):
            run = sorted(siblings[(v[0], overlay_patch.parent(v))])
            if (v[0] - 1, overlay_patch.parent(v)) in checked and run[0] < v < run[-1]:
                candidates.append(v)
        assert candidates

        rng = random.Random(5)
        for _ in range(50):
            v = rng.choice(candidates)
            current = overlay_patch.label(v)
            letter = rng.choice([x for x in ov.letters if x != current])
            report = check_membership(mutate_label(overlay_patch, v, letter), family)
            near = nx.single_source_shortest_path_length(overlay_patch.graph, v, cutoff=5)
            assert any(report.status(u) == FAIL for u in near), (v, letter)

    def test_decorated_patch_is_not_overlay(self, family):
        """Test labels outside the combined alphabet fail."""
        patch = reduce(build_orbit_graph(decorated_window(5, 5, 4, 60)))
        report = check_membership(patch, family)
        assert report.results
        assert {item['status'] for item in report.results} == {FAIL}
        assert report.results[0]['reason'].endswith('is not in the combined alphabet')
        assert report.status(report.results[0]['vertex']) == FAIL
