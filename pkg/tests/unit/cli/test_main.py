"""Unit tests for the orbitile command line."""

import argparse
import json
import os
from fractions import Fraction
from unittest.mock import patch

import pytest

from orbitile.config import config
from orbitile.graph.patch import build_orbit_graph, dumps_patch, reduce
from orbitile.main import EXIT_INVALID, EXIT_OK, EXIT_UNDECIDED, EXIT_USAGE, cli, parse_offset, parse_windows
from orbitile.substitution.system import make_system
from orbitile.surface.family import PatternFamily, save_family
from orbitile.surface.pq import decorated_window


def run_json(capsys, argv) -> tuple[int, dict]:
    code = cli(argv)
    return code, json.loads(capsys.readouterr().out)


class TestArgumentTypes:
    """Test cases for offset and window arguments."""

    def test_rational_offset(self):
        """Test p/q offsets are read exactly."""
        assert parse_offset('1/3') == Fraction(1, 3)
        assert parse_offset('-2') == Fraction(-2)

    def test_decimal_offset_warns(self):
        """Test a decimal offset is converted with a warning."""
        with patch('orbitile.main.logger') as mock_log:
            assert parse_offset('0.25') == Fraction(1, 4)
        mock_log.warning.assert_called_once()

    def test_bad_offset(self):
        """Test text that is no number is rejected."""
        with pytest.raises(argparse.ArgumentTypeError) as exc_info:
            parse_offset('half')
        assert str(exc_info.value) == "not a rational number: 'half'"

    @pytest.mark.parametrize(
        'text,expected', [('3', (3, None, None)), ('3x4', (3, 4, None)), ('2x4x100', (2, 4, 100))]
    )
    def test_window_spec(self, text, expected):
        """Test N[xROWS[xWIDTH]] window specs."""
        assert parse_windows(text) == expected

    @pytest.mark.parametrize('text', ['x', '0', '1x2x3x4', 'ax2'])
    def test_bad_window_spec(self, text):
        """Test malformed window specs are rejected."""
        with pytest.raises(argparse.ArgumentTypeError):
            parse_windows(text)


class TestUsage:
    """Test cases for usage errors."""

    def test_no_command(self, capsys):
        """Test a missing subcommand is a usage error."""
        assert cli([]) == EXIT_USAGE

    def test_missing_argument(self, capsys):
        """Test a missing positional argument is a usage error."""
        assert cli(['compat', 'only-one.sys']) == EXIT_USAGE

    def test_help(self, capsys):
        """Test --help exits cleanly."""
        assert cli(['--help']) == EXIT_OK

    def test_missing_file(self, temp_dir):
        """Test an unreadable system file is a usage error."""
        assert cli(['analyze', os.path.join(temp_dir, 'nope.sys')]) == EXIT_USAGE


class TestAnalyze:
    """Test cases for orbitile analyze."""

    def test_fibonacci(self, capsys, system_files):
        """Test the Fibonacci report carries the golden ratio."""
        code, doc = run_json(capsys, ['analyze', system_files['fib.sys'], '--json'])
        assert code == EXIT_OK
        assert doc['name'] == 'fib'
        assert doc['matrix'] == [[1, 1], [1, 0]]
        assert doc['primitive'] is True
        assert doc['expansive'] is True
        assert doc['lambda'].startswith('1.6180339887')
        assert doc['theta']['ok'] is True

    def test_not_primitive(self, capsys, system_files):
        """Test a letter swap is reported as invalid."""
        code, doc = run_json(capsys, ['analyze', system_files['swap.sys'], '--json'])
        assert code == EXIT_INVALID
        assert doc['primitive'] is False
        assert doc['expansive'] is None

    def test_text_output(self, system_files, temp_dir):
        """Test the plain report is written as key: value lines."""
        out = os.path.join(temp_dir, 'fib.txt')
        assert cli(['analyze', system_files['fib.sys'], '-o', out]) == EXIT_OK
        with open(out) as f:
            lines = f.read().splitlines()
        assert lines[0] == 'name: fib'


class TestCompat:
    """Test cases for orbitile compat."""

    def test_binary_ternary(self, capsys, system_files):
        """Test 2 and 3 have no common power up to the bound."""
        code, doc = run_json(capsys, ['compat', system_files['bin.sys'], system_files['tri.sys']])
        assert code == EXIT_OK
        assert doc['verdict'] == 'IncommensurateUpTo(20)'
        assert doc['K'] == 1

    def test_ternary_binary(self, capsys, system_files):
        """Test K = 2 when the faster system comes first."""
        code, doc = run_json(capsys, ['compat', system_files['tri.sys'], system_files['bin.sys'], '--bound', '8'])
        assert code == EXIT_OK
        assert doc['verdict'] == 'IncommensurateUpTo(8)'
        assert doc['K'] == 2

    def test_binary_quaternary(self, capsys, system_files):
        """Test 2² = 4 is found."""
        code, doc = run_json(capsys, ['compat', system_files['bin.sys'], system_files['quad.sys']])
        assert code == EXIT_OK
        assert doc['verdict'] == 'Commensurate(2,1)'
        assert (doc['m'], doc['n']) == (2, 1)


class TestOrbitCommands:
    """Test cases for orbit, graph, periods and render."""

    def test_base_orbit_pipeline(self, capsys, system_files, temp_dir):
        """Test a base window can be graphed, searched for periods and drawn."""
        window = os.path.join(temp_dir, 'bin.json')
        assert cli(['orbit', system_files['bin.sys'], '--rows', '4', '--width', '12', '-o', window]) == EXIT_OK
        with open(window) as f:
            assert json.load(f)['kind'] == 'base'

        code, doc = run_json(capsys, ['graph', window])
        assert code == EXIT_OK
        assert len(doc['vertices']) == 4 * 25

        code, doc = run_json(capsys, ['periods', window, '--max-pi', '1'])
        assert code == EXIT_OK
        assert doc['periodic'] is True
        assert doc['periods'][0]['pi'] == 1

        svg = os.path.join(temp_dir, 'bin.svg')
        assert cli(['render', window, '--c', '1/10', '--d', '1/20', '-o', svg]) == EXIT_OK
        with open(svg) as f:
            assert f.read().startswith('<svg')

    def test_overlay_orbit(self, system_files, temp_dir):
        """Test an overlay window is built, validated and drawn."""
        window = os.path.join(temp_dir, 'tri_bin.json')
        argv = ['orbit', system_files['tri.sys'], system_files['bin.sys'], '--rows', '3', '--width', '30']
        assert cli(argv + ['--c', '1/10', '--d', '1/20', '-o', window]) == EXIT_OK
        with open(window) as f:
            doc = json.load(f)
        assert doc['kind'] == 'overlay'
        assert doc['metadata']['c'] == '1/10'
        assert cli(['render', window, '--c', '1/10', '--d', '1/20', '-o', os.path.join(temp_dir, 'o.svg')]) == EXIT_OK

    def test_row_tie_rejected(self, monkeypatch, system_files, temp_dir):
        """Test an exact row tie is undecidable when ties are rejected."""
        monkeypatch.setattr(config, 'reject_row_ties', False)
        cfg = os.path.join(temp_dir, 'strict.toml')
        with open(cfg, 'w') as f:
            f.write('[orbit]\nreject_row_ties = true\n')
        argv = ['orbit', system_files['tri.sys'], system_files['bin.sys'], '--rows', '2', '--d', '0']
        assert cli(argv + ['--config', cfg]) == EXIT_UNDECIDED

    def test_graph_check_pq(self, capsys, temp_dir):
        """Test a saved decorated window passes the {5,5} check once reduced."""
        from orbitile.orbit.window import save_window

        window = os.path.join(temp_dir, 'pq.json')
        save_window(decorated_window(5, 5, 4, 60), window)
        code, doc = run_json(capsys, ['graph', window, '--reduce', '--check-pq', '5', '5'])
        assert code == EXIT_OK
        assert doc['check_pq']['ok'] is True
        assert all(entry['ok'] for entry in doc['face_tally'])

        code, _ = run_json(capsys, ['graph', window, '--check-pq', '5', '5'])
        assert code == EXIT_INVALID


class TestSurfaceCommands:
    """Test cases for reconstruct and member."""

    @pytest.fixture
    def patch_file(self, temp_dir):
        path = os.path.join(temp_dir, 'patch.json')
        with open(path, 'w') as f:
            f.write(dumps_patch(reduce(build_orbit_graph(decorated_window(5, 5, 4, 60)))))
        return path

    def test_reconstruct(self, capsys, patch_file):
        """Test a decorated patch is reconstructed against its own names."""
        code, doc = run_json(capsys, ['reconstruct', patch_file, '--p', '5', '--q', '5'])
        assert code == EXIT_OK
        assert doc['ground_truth']['ok'] is True

    def test_reconstruct_reads_pq_from_patch(self, capsys, patch_file):
        """Test --p and --q default to the {p,q} stored with the patch."""
        code, doc = run_json(capsys, ['reconstruct', patch_file])
        assert code == EXIT_OK
        assert doc['ground_truth']['ok'] is True

    def test_reconstruct_without_pq(self, temp_dir):
        """Test a patch that records no {p,q} needs them on the command line."""
        from orbitile.orbit.seed import seed_orbit

        path = os.path.join(temp_dir, 'binary.json')
        with open(path, 'w') as f:
            f.write(dumps_patch(build_orbit_graph(seed_orbit(make_system('binary', {'0': '00'}), 4, 8))))
        assert cli(['reconstruct', path]) == EXIT_USAGE

    def test_member_fails_outside_alphabet(self, capsys, patch_file, temp_dir):
        """Test a patch without overlay labels fails membership."""
        family = os.path.join(temp_dir, 'family.json')
        save_family(PatternFamily(5, 5, make_system('binary', {'0': '00'})), family)
        code, doc = run_json(capsys, ['member', patch_file, family])
        assert code == EXIT_INVALID
        assert doc['ok'] is False
        assert doc['counts']['FAIL'] > 0
