"""Critical couplings and onset simulations for interacting oscillator populations."""

from ._core import (
    AnalyzerError,
    ConfigError,
    CriticalSet,
    CriticalSolution,
    Lorentzian,
    Population,
    SamplingMode,
    ScanParams,
    SimParams,
    SweepResult,
    System,
    TrialResult,
    __version__,
    analyze,
    detect_onset,
    dispersion_roots_at,
    evaluate_determinant,
    find_critical_couplings,
    identical_critical,
    lorentzian_pdf,
    lorentzian_quantile,
    run_trial,
    sample_frequencies,
    sweep_eta,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
