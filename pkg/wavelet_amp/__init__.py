from wavelet_amp.utils.logger import logger
from wavelet_amp.wavelets import Family, Kind, cascade_tabulate, load_filter
from wavelet_amp.dictionary import Dictionary, DictionarySpec, FamilySpec, build_dictionary, scalarize
from wavelet_amp.matching_pursuit import SampledDictionary, decompose, reconstruct
from wavelet_amp.identifier import AmpIdentifier, RegressorConfig, Safeguard, build_regressor
from wavelet_amp.control import ReferenceModel, control_law, poles_to_coefficients, reference_step
from wavelet_amp.plants import NoiseSource, ParamSchedule, PlantState, f1_eval, f2_eval, plant_step
from wavelet_amp.config import ConfigError, SimConfig, example_config, resolve_config
from wavelet_amp.simulation import SimulationHalted, compute_metrics, run_closed_loop, run_sweep, simulate
