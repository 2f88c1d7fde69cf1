import os
import toml
import logging
from pathlib import Path
from fractions import Fraction
from dataclasses import dataclass, field, fields
from typing import Any, Dict

logger = logging.getLogger(__name__)


@dataclass
class Config:
    """
    ### precision Attributes ###
    bit_budget: Largest precision, in bits, an interval comparison may refine to before giving up. Overridden by ORBITILE_BITS.
    start_bits: Precision of the first refinement attempt.
    exact_fallback_bits: Precision at which overlapping enclosures are handed to the exact minimal-polynomial test.

    ### overlay Attributes ###
    scale_slack: Rational slack s in min nu' = s * gamma * max eta' (must exceed 1).
    bound: Default search bound M for commensurability verdicts.

    ### orbit Attributes ###
    resolve_ties_leftward: Resolve an exact tie in a column index by taking the smaller index instead of raising.
    reject_row_ties: Raise on an exact tie gamma^Delta = e^d lambda^i instead of accepting the half-open floor.
    default_c: Horizontal offset used when none is given (exact rational).
    default_d: Vertical offset used when none is given (exact rational).
    default_rows: Number of overlay rows built by default.
    default_width: Letters kept on each side of the anchor in truncated windows.
    equation_samples: Random (i, j, k) triples checked per window by the covering inequality check.
    seed: Seed for every random choice (offset sampling, spot checks, mutations).

    ### graph Attributes ###
    period_min_overlap: Fraction of the shorter row a horizontal shift must overlap to count as a period candidate.

    ### family Attributes ###
    family_windows: Number of offset pairs sampled when collecting a pattern family.
    family_rows: Overlay rows per sampled window.
    family_width: Letters kept on each side of the anchor per sampled window.

    ### render Attributes ###
    scale: SVG user units per horocyclic unit.
    fill_colors: Fill colours cycled over the letters of the first tiling.
    stroke: Stroke colour of the first tiling.
    stroke_width: Stroke width of both tilings.
    overlay_stroke: Stroke colour of the stroke-only overlay tiling.
    """

    # precision Attributes
    bit_budget: int = int(os.getenv('ORBITILE_BITS', '4096'))
    start_bits: int = 64
    exact_fallback_bits: int = 128

    # overlay Attributes
    scale_slack: str = '3/2'
    bound: int = 20

    # orbit Attributes
    resolve_ties_leftward: bool = False
    reject_row_ties: bool = False
    default_c: str = '1/10'
    default_d: str = '1/20'
    default_rows: int = 8
    default_width: int = 40
    equation_samples: int = 100
    seed: int = 0

    # graph Attributes
    period_min_overlap: float = 0.5

    # family Attributes
    family_windows: int = 3
    family_rows: int = 4
    family_width: int = 160

    # render Attributes
    scale: float = 100.0
    fill_colors: list = field(
        default_factory=lambda: ['#f4d35e', '#8ecae6', '#ee964b', '#b5e48c', '#cdb4db']
    )
    stroke: str = '#333333'
    stroke_width: float = 0.6
    overlay_stroke: str = '#c0392b'

    def __str__(self):
        def to_items(obj):
            if isinstance(obj, dict):
                return obj.items()
            if hasattr(obj, '__dict__'):
                return vars(obj).items()
            return []

        sections = [
            ('### precision Attributes ###', self.get_precision_params()),
            ('### orbit Attributes ###', self.get_orbit_params()),
            ('### render Attributes ###', self.get_render_params()),
        ]

        return '\n\n'.join(
            f'{title}\n' + '\n'.join(f'{k}: {v}' for k, v in to_items(params))
            for title, params in sections
        )

    def finalize_config(self):
        """
        More tweaks to the config after it's been loaded.
        """
        if self.start_bits < 16:
            logger.warning('start_bits=%s is too small, using 16', self.start_bits)
            self.start_bits = 16
        if self.bit_budget < self.start_bits:
            logger.warning(
                'bit_budget=%s is below start_bits=%s, raising it',
                self.bit_budget,
                self.start_bits,
            )
            self.bit_budget = self.start_bits
        self.exact_fallback_bits = min(
            max(self.exact_fallback_bits, self.start_bits), self.bit_budget
        )

        if Fraction(self.scale_slack) <= 1:
            logger.warning('scale_slack=%s must exceed 1, using 3/2', self.scale_slack)
            self.scale_slack = '3/2'

        if not 0 < self.period_min_overlap <= 1:
            logger.warning(
                'period_min_overlap=%s outside (0, 1], using 0.5', self.period_min_overlap
            )
            self.period_min_overlap = 0.5

    def update(self, values: Dict[str, Any]) -> None:
        """Apply a (possibly sectioned) mapping of overrides."""
        known = {f.name for f in fields(self)}
        for key, value in values.items():
            if isinstance(value, dict) and key not in known:
                self.update(value)
            elif key in known:
                setattr(self, key, value)
            else:
                logger.warning('Ignoring unknown configuration key %r', key)

    def get_precision_params(self, overrides: Dict[str, Any] | None = None):
        """
        Returns the parameters of the adaptive-precision kernel.
        """
        overrides = overrides or {}

        base_kwargs = dict(
            bit_budget          = self.bit_budget,
            start_bits          = self.start_bits,
            exact_fallback_bits = self.exact_fallback_bits,
        )

        base_kwargs.update(overrides)
        return PrecisionParams(**base_kwargs)

    def get_orbit_params(self, overrides: Dict[str, Any] | None = None):
        """
        Returns the parameters of alphabet enumeration and orbit construction.
        """
        overrides = overrides or {}

        base_kwargs = dict(
            scale_slack           = Fraction(self.scale_slack),
            resolve_ties_leftward = self.resolve_ties_leftward,
            reject_row_ties       = self.reject_row_ties,
            default_c             = Fraction(self.default_c),
            default_d             = Fraction(self.default_d),
            default_rows          = self.default_rows,
            default_width         = self.default_width,
            equation_samples      = self.equation_samples,
            period_min_overlap    = self.period_min_overlap,
            seed                  = self.seed,
        )

        base_kwargs.update(overrides)
        return OrbitParams(**base_kwargs)

    def get_render_params(self, overrides: Dict[str, Any] | None = None):
        overrides = overrides or {}

        base_kwargs = dict(
            scale          = self.scale,
            fill_colors    = list(self.fill_colors),
            stroke         = self.stroke,
            stroke_width   = self.stroke_width,
            overlay_stroke = self.overlay_stroke,
        )

        base_kwargs.update(overrides)
        return RenderParams(**base_kwargs)

    def _load(self) -> Dict[str, Any]:
        """Read the TOML configuration file at the repository root."""
        if not CONFIG_FILE.exists():
            raise FileNotFoundError(
                f"Configuration file '{CONFIG_FILE}' was not found - please create it "
                '(see config.toml in the repository root).'
            )
        return toml.load(CONFIG_FILE)


class PrecisionParams:
    def __init__(self, bit_budget, start_bits, exact_fallback_bits):
        self.bit_budget = bit_budget
        self.start_bits = start_bits
        self.exact_fallback_bits = exact_fallback_bits


class OrbitParams:
    def __init__(
        self,
        scale_slack,
        resolve_ties_leftward,
        reject_row_ties,
        default_c,
        default_d,
        default_rows,
        default_width,
        equation_samples,
        period_min_overlap,
        seed,
    ):
        self.scale_slack = scale_slack
        self.resolve_ties_leftward = resolve_ties_leftward
        self.reject_row_ties = reject_row_ties
        self.default_c = default_c
        self.default_d = default_d
        self.default_rows = default_rows
        self.default_width = default_width
        self.equation_samples = equation_samples
        self.period_min_overlap = period_min_overlap
        self.seed = seed


class RenderParams:
    def __init__(self, scale, fill_colors, stroke, stroke_width, overlay_stroke):
        self.scale = scale
        self.fill_colors = fill_colors
        self.stroke = stroke
        self.stroke_width = stroke_width
        self.overlay_stroke = overlay_stroke


def load_config(path: str | Path | None = None) -> Config:
    """Build a fresh Config from defaults, the repository file and an optional user file."""
    cfg = Config()
    cfg.update(user_config)
    if path is not None:
        cfg.update(toml.load(path))
    cfg.finalize_config()
    return cfg


def apply_config(path: str | Path) -> Config:
    """Merge a user TOML file into the shared ``config`` in place."""
    config.update(toml.load(path))
    config.finalize_config()
    return config


current_dir = os.path.dirname(os.path.abspath(__file__))
root_dir = Path(current_dir).resolve().parent
CONFIG_FILE = root_dir / 'config.toml'

config = Config()
user_config = config._load() if CONFIG_FILE.exists() else {}
config.update(user_config)
config.finalize_config()
