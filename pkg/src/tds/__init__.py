"""Modelling, analysis and simulation of LTI systems with time delays."""

from .errors import (ConnectError, DimensionError, IllPosedError, ModelError, NeutralSystemError,
                     NoCrossingError, NumericalError, TdsError)
from .freq import (FrequencyResponse, MarginReport, auto_grid, bandwidth, bode_data, dcgain,
                   freq_response, margins, nyquist_data)
from .interconnect import (ModelArray, SumJunction, append, connect, feedback, inverse, lft,
                           parallel, series, stack)
from .model import (DelayDdeForm, GltiModel, TransferFunction, close_delays, from_delay_dde,
                    make_tf, normalize, pure_delay, ss, static_gain, tf, to_glti)
from .pid import PidController, TuneReport, default_crossover, tune_pid
from .sim import SimulationResult, StepMetrics, lsim, simulate, step_metrics, step_response
from .spectral import (SpectrumResult, Verdict, generator_matrix, is_stable, newton_refine,
                       pade_delay, pade_model, rightmost_roots)

__version__ = "0.1.0"
