"""Models Package"""
from src.models.hamiltonian import (
    MAX_SPINS,
    SpinHamiltonian,
    complete_topology,
    ring_topology,
    path_topology,
    star_topology,
    gauge_flip,
    gauge_normalize,
)
from src.models.star import (
    StarParams,
    build_star,
    build_star_bar,
    star_spectrum,
    star_log_z,
    star_stats,
    star_heat_capacity,
)
from src.models.star_chain import (
    StarChainParams,
    build_star_chain,
    star_chain_log_z,
    star_chain_stats,
    star_chain_heat_capacity,
    star_chain_spectrum,
    star_chain_eigenvalues,
    star_chain_family,
)
from src.models.ising import (
    IsingParams,
    AllToAllParams,
    build_ising_1d,
    build_all_to_all,
    ising_1d_stats,
    ising_1d_spectrum,
    all_to_all_spectrum,
    ksat_reference_curve,
)
from src.models.chimera import chimera_topology, chimera_hub_layout, embed_star_chain_in_chimera
from src.models.families import TIED_MODELS, TiedModel, tied_model, star_family, star_constrained_family
from src.models.model_files import (
    ModelParams,
    parse_topology,
    load_model,
    save_model,
    model_from_dict,
    model_to_dict,
    render_model,
    analytic_stats,
    analytic_spectrum,
)

__all__ = [
    'MAX_SPINS', 'SpinHamiltonian', 'complete_topology', 'ring_topology', 'path_topology',
    'star_topology', 'gauge_flip', 'gauge_normalize',
    'StarParams', 'build_star', 'build_star_bar', 'star_spectrum', 'star_log_z', 'star_stats',
    'star_heat_capacity',
    'StarChainParams', 'build_star_chain', 'star_chain_log_z', 'star_chain_stats',
    'star_chain_heat_capacity', 'star_chain_spectrum', 'star_chain_eigenvalues', 'star_chain_family',
    'IsingParams', 'AllToAllParams', 'build_ising_1d', 'build_all_to_all', 'ising_1d_stats',
    'ising_1d_spectrum', 'all_to_all_spectrum', 'ksat_reference_curve',
    'chimera_topology', 'chimera_hub_layout', 'embed_star_chain_in_chimera',
    'TIED_MODELS', 'TiedModel', 'tied_model', 'star_family', 'star_constrained_family',
    'ModelParams', 'parse_topology', 'load_model', 'save_model', 'model_from_dict', 'model_to_dict', 'render_model',
    'analytic_stats', 'analytic_spectrum',
]
