"""Statistical inference for network dependent data: denseness statistics,
kernel HAC variance estimation, process simulation on random networks, and
Monte Carlo coverage studies."""

from .graph import (Graph, UNREACHABLE, build_graph, clique_number,
                    embedding_check, fixture, read_edge_list, set_distance,
                    shells, write_edge_list)
from .netstats import (ThetaSequence, c_coef, condition_report, default_m_n,
                       delta_ball, delta_cap, delta_shell, denseness_profile,
                       h_set_count, nf_q_threshold, shell_tail_bound,
                       table1_stats)
from .kernels import (BandwidthRule, KernelSpec, bandwidth, kernel_eval,
                      kernel_regularity, psd_check, weight_matrix)
from .hac import (HacResult, Sample, confidence_interval, exact_variance_oracle,
                  hac_known_mean, hac_partial, hac_unknown_mean,
                  ma_weight_matrix, omega_hat, omega_tilde)
from .dgp import (FormationSpec, LinearModelSpec, drop_edges, form_network,
                  project_vector_sample, simulate_dependency_graph,
                  simulate_linear, theta_gaussian_functional,
                  theta_linear_bound)
from .verify import (CovBoundInputs, cov_bound_a1, cov_bound_product,
                     clt_diagnostic, lln_diagnostic, psi_bound_check)
from .montecarlo import McCell, McReport, power_curve, run_cell, run_grid

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
