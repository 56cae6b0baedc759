"""Maximum clique and independent set on geometric intersection graphs."""

from .approx import (
    IocpViolation,
    SolveResult,
    derive_params,
    mis_eptas,
    mis_iocp_recursive,
    mis_subexp,
    qptas_branch,
)
from .gadgets import (
    GadgetError,
    co2subdivision,
    realize,
    realize_co2subdivision,
    realize_co_cycles_disks,
    verify_realization,
)
from .geom import Ball, Ellipse, GeometricInstance, Triangle, intersection_graph, load_instance, save_instance
from .graph import Graph, brute_force, complement, mis_bipartite
from .pipelines import NotDiskGraph, PipelineConfig, clique_disk, clique_pierce2, clique_unit_ball

__version__ = "0.1.0"

__all__ = [
    "IocpViolation",
    "SolveResult",
    "derive_params",
    "mis_eptas",
    "mis_iocp_recursive",
    "mis_subexp",
    "qptas_branch",
    "GadgetError",
    "co2subdivision",
    "realize",
    "realize_co2subdivision",
    "realize_co_cycles_disks",
    "verify_realization",
    "Ball",
    "Ellipse",
    "GeometricInstance",
    "Triangle",
    "intersection_graph",
    "load_instance",
    "save_instance",
    "Graph",
    "brute_force",
    "complement",
    "mis_bipartite",
    "NotDiskGraph",
    "PipelineConfig",
    "clique_disk",
    "clique_pierce2",
    "clique_unit_ball",
]
