import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from orbitile.config import apply_config, config
from orbitile.graph.patch import build_orbit_graph, check_pq, face_tally, loads_patch, patch_to_json, reduce
from orbitile.orbit.analysis import period_search
from orbitile.orbit.builder import overlay_orbit, restore_system
from orbitile.orbit.seed import seed_orbit
from orbitile.orbit.validation import validate_window
from orbitile.orbit.window import load_window, window_to_json
from orbitile.overlay.alphabet import check_letter, compute_K, enumerate_alphabet
from orbitile.render.svg import check_abutment, render_tiling, tile_rects, write_svg
from orbitile.substitution.core import (
    Commensurate,
    Indeterminate,
    characteristic_polynomial,
    distribution,
    eigenvalue_dominance,
    growth_rate,
    incommensurate,
    is_expansive,
    is_primitive,
    letter_frequencies,
    minimal_polynomial,
    substitution_matrix,
    theta_bracket,
)
from orbitile.substitution.system import load_system
from orbitile.surface.family import check_membership, collect_pattern_family, load_family
from orbitile.surface.pq import pq_of, pq_substitution
from orbitile.surface.reconstruct import match_ground_truth, reconstruct_rows
from orbitile.util.exceptions import DegenerateOffset, IndeterminateComparison, OrbitileError
from orbitile.util.logger import log_settings
from orbitile.util.logger import orbitile_logger as logger

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_UNDECIDED = 0, 1, 2, 3


def parse_offset(text: str) -> Fraction:
    """Offsets are exact rationals ``p/q``; decimals are converted with a warning."""
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as err:
        raise argparse.ArgumentTypeError(f'not a rational number: {text!r}') from err
    if any(ch in text for ch in '.eE'):
        logger.warning('offset %s given as a decimal, using the rational %s', text, value)
    return value


def parse_windows(text: str) -> tuple[int, int | None, int | None]:
    """``N``, ``NxROWS`` or ``NxROWSxWIDTH``."""
    try:
        parts = [int(x) for x in text.lower().split('x')]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f'bad window spec: {text!r}') from err
    if not 1 <= len(parts) <= 3 or any(x < 1 for x in parts):
        raise argparse.ArgumentTypeError(f'bad window spec: {text!r}')
    parts += [None] * (3 - len(parts))
    return tuple(parts)


def _emit(doc, out: str | None = None) -> None:
    text = json.dumps(doc, ensure_ascii=False, indent=4)
    if out:
        Path(out).write_text(text + '\n')
        logger.info('wrote %s', out)
    else:
        print(text)


# subcommands


def cmd_analyze(args) -> int:
    sys_ = load_system(args.system)
    doc = {
        'name': sys_.name,
        'alphabet': list(sys_.alphabet),
        'matrix': substitution_matrix(sys_).tolist(),
        'primitive': is_primitive(sys_),
        'characteristic_polynomial': str(characteristic_polynomial(sys_).as_expr()),
    }
    doc['expansive'] = is_expansive(sys_) if doc['primitive'] else None
    if not (doc['primitive'] and doc['expansive']):
        _emit(doc, args.output)
        return EXIT_INVALID

    lam = growth_rate(sys_)
    theta = theta_bracket(sys_)
    doc.update(
        {
            'lambda': lam.to_decimal(),
            'minimal_polynomial': str(minimal_polynomial(sys_).as_expr()),
            'nu': distribution(sys_).to_decimal(),
            'frequencies': {str(a): f.to_decimal() for a, f in letter_frequencies(sys_).items()},
            'dominant': eigenvalue_dominance(sys_),
            'theta': {'constant': theta.constant, 'ok': theta.ok},
        }
    )
    if args.json:
        _emit(doc, args.output)
    else:
        lines = [f'{key}: {value}' for key, value in doc.items()]
        if args.output:
            Path(args.output).write_text('\n'.join(lines) + '\n')
        else:
            print('\n'.join(lines))
    return EXIT_OK


def cmd_compat(args) -> int:
    sys_a, sys_b = load_system(args.a), load_system(args.b)
    verdict = incommensurate(sys_a, sys_b, args.bound)
    doc = {'a': sys_a.name, 'b': sys_b.name, 'verdict': str(verdict)}
    if isinstance(verdict, Commensurate):
        doc.update({'m': verdict.m, 'n': verdict.n})
    else:
        doc['K'] = compute_K(growth_rate(sys_a), growth_rate(sys_b))
    logger.info('%s vs %s: %s', sys_a.name, sys_b.name, verdict, extra={'msg_type': 'VERDICT'})
    _emit(doc, args.output)
    if isinstance(verdict, Indeterminate):
        return EXIT_UNDECIDED
    return EXIT_OK


def cmd_alphabet(args) -> int:
    ov = enumerate_alphabet(load_system(args.a), load_system(args.b))
    doc = ov.to_json()
    code = EXIT_OK
    if args.verify:
        rejected = [str(x) for x in ov.letters if not check_letter(ov, x)]
        doc['verify'] = {'checked': len(ov.letters), 'rejected': rejected}
        code = EXIT_INVALID if rejected else EXIT_OK
    _emit(doc, args.output)
    return code


def cmd_orbit(args) -> int:
    sys_a = load_system(args.a)
    params = config.get_orbit_params()
    rows = args.rows or params.default_rows
    width = args.width or params.default_width
    if args.b is None:
        window = seed_orbit(sys_a, rows, width)
    else:
        ov = enumerate_alphabet(sys_a, load_system(args.b))
        window = overlay_orbit(ov, rows, args.c, args.d, width)
    report = validate_window(window)
    if not report.ok:
        _emit(report.to_json())
        return EXIT_INVALID
    _emit(window_to_json(window), args.output)
    return EXIT_OK


def cmd_graph(args) -> int:
    patch = build_orbit_graph(load_window(args.window))
    if args.reduce:
        patch = reduce(patch)
    if args.check_pq is None:
        _emit(patch_to_json(patch), args.output)
        return EXIT_OK
    p, q = args.check_pq
    report = check_pq(patch, p, q)
    if args.output:
        _emit(patch_to_json(patch), args.output)
    _emit({'check_pq': report.to_json(), 'face_tally': face_tally(patch)})
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_reconstruct(args) -> int:
    patch = loads_patch(Path(args.patch).read_text())
    recorded = pq_of(patch.metadata) or (None, None)
    p = args.p if args.p is not None else recorded[0]
    q = args.q if args.q is not None else recorded[1]
    if p is None or q is None:
        logger.error('%s records no {p,q}; pass --p and --q', args.patch, extra={'msg_type': 'ERROR'})
        return EXIT_USAGE
    sys_ = pq_substitution(p, q)
    recon = reconstruct_rows(patch, p, sys_)
    truth = match_ground_truth(patch, recon)
    _emit({'reconstruction': recon.to_json(), 'ground_truth': truth}, args.output)
    return EXIT_OK if truth['ok'] else EXIT_INVALID


def cmd_family(args) -> int:
    count, rows, width = args.windows or (None, None, None)
    family = collect_pattern_family(
        args.p, args.q, load_system(args.b), windows=count, rows=rows, width=width, seed=args.seed
    )
    _emit(family.to_json(), args.output)
    return EXIT_OK


def cmd_member(args) -> int:
    patch = loads_patch(Path(args.patch).read_text())
    report = check_membership(patch, load_family(args.family))
    _emit(report.to_json(), args.output)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_render(args) -> int:
    window = restore_system(load_window(args.window))
    overlay = restore_system(load_window(args.overlay)) if args.overlay else None
    c = args.c if args.c is not None else 0
    d = args.d if args.d is not None else 0
    failures = check_abutment(tile_rects(window, c, d), window)
    if overlay is not None:
        failures += check_abutment(tile_rects(overlay, c, -d), overlay)
    if failures:
        _emit({'abutment': failures})
        return EXIT_INVALID
    text = write_svg(render_tiling(window, c, d, overlay=overlay), args.output)
    if not args.output:
        print(text, end='')
    return EXIT_OK


def cmd_periods(args) -> int:
    window = load_window(args.window)
    periods = period_search(window, args.max_pi)
    _emit(
        {
            'max_pi': args.max_pi,
            'periodic': bool(periods),
            'periods': [{'pi': pi, 'evidence': evidence} for pi, evidence in periods],
        },
        args.output,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=None, help='TOML file merged over config.toml')
    common.add_argument('-o', '--output', type=str, default=None, help='Write the result here instead of stdout')

    parser = argparse.ArgumentParser(
        prog='orbitile', description='Aperiodic tilings and SFTs from pairs of substitution systems'
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('analyze', parents=[common], help='Matrix, λ, ν and minimal polynomial of a system')
    p.add_argument('system')
    p.add_argument('--json', action='store_true')
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser('compat', parents=[common], help='Incommensurability verdict of two systems')
    p.add_argument('a')
    p.add_argument('b')
    p.add_argument('--bound', type=int, default=None)
    p.set_defaults(handler=cmd_compat)

    p = sub.add_parser('alphabet', parents=[common], help='Enumerate the overlay alphabet')
    p.add_argument('a')
    p.add_argument('b')
    p.add_argument('--verify', action='store_true')
    p.set_defaults(handler=cmd_alphabet)

    p = sub.add_parser('orbit', parents=[common], help='Build and validate a base or overlay window')
    p.add_argument('a')
    p.add_argument('b', nargs='?', default=None)
    p.add_argument('--rows', type=int, default=None)
    p.add_argument('--width', type=int, default=None)
    p.add_argument('--c', type=parse_offset, default=None)
    p.add_argument('--d', type=parse_offset, default=None)
    p.set_defaults(handler=cmd_orbit)

    p = sub.add_parser('graph', parents=[common], help='Orbit graph of a window')
    p.add_argument('window')
    p.add_argument('--reduce', action='store_true')
    p.add_argument('--check-pq', type=int, nargs=2, metavar=('P', 'Q'), default=None)
    p.set_defaults(handler=cmd_graph)

    p = sub.add_parser('reconstruct', parents=[common], help='Recover rows and parents of a reduced patch')
    p.add_argument('patch')
    p.add_argument('--p', type=int, default=None, help='defaults to the {p,q} the patch records')
    p.add_argument('--q', type=int, default=None)
    p.set_defaults(handler=cmd_reconstruct)

    p = sub.add_parser('family', parents=[common], help='Collect a desk-scale pattern family')
    p.add_argument('--p', type=int, required=True)
    p.add_argument('--q', type=int, required=True)
    p.add_argument('--b', type=str, required=True)
    p.add_argument('--windows', type=parse_windows, default=None, metavar='N[xROWS[xWIDTH]]')
    p.add_argument('--seed', type=int, default=None)
    p.set_defaults(handler=cmd_family)

    p = sub.add_parser('member', parents=[common], help='Check a patch against a pattern family')
    p.add_argument('patch')
    p.add_argument('family')
    p.set_defaults(handler=cmd_member)

    p = sub.add_parser('render', parents=[common], help='Draw a window, optionally with a second one')
    p.add_argument('window')
    p.add_argument('--overlay', type=str, default=None)
    p.add_argument('--c', type=parse_offset, default=None)
    p.add_argument('--d', type=parse_offset, default=None)
    p.set_defaults(handler=cmd_render)

    p = sub.add_parser('periods', parents=[common], help='Search a window for vertical periods')
    p.add_argument('window')
    p.add_argument('--max-pi', type=int, required=True)
    p.set_defaults(handler=cmd_periods)
    return parser


def cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_OK if err.code == 0 else EXIT_USAGE

    try:
        if args.config:
            apply_config(args.config)
        log_settings(
            args.command,
            {
                'seed': args.seed if getattr(args, 'seed', None) is not None else config.seed,
                'bit_budget': config.bit_budget,
                'c': getattr(args, 'c', None),
                'd': getattr(args, 'd', None),
            },
        )
        return args.handler(args)
    except (IndeterminateComparison, DegenerateOffset) as err:
        logger.error(str(err), extra={'msg_type': 'ERROR'})
        return EXIT_UNDECIDED
    except OrbitileError as err:
        logger.error(str(err), extra={'msg_type': 'ERROR'})
        return EXIT_INVALID
    except OSError as err:
        logger.error(str(err), extra={'msg_type': 'ERROR'})
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(cli())
