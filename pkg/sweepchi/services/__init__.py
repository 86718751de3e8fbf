from .catalog import catalog, get_scene
from .domain import Domain, Scene, dump_scene, load_scene, validate_domain
from .oracle import chi_cell_complex, chi_gauss_bonnet, sweep_census
from .special import chi_planar, chi_sphere_meridians, chi_sphere_parallels, excise_poles
from .sweep import euler_characteristic, sweep

__all__ = [
    "Domain",
    "Scene",
    "catalog",
    "chi_cell_complex",
    "chi_gauss_bonnet",
    "chi_planar",
    "chi_sphere_meridians",
    "chi_sphere_parallels",
    "dump_scene",
    "euler_characteristic",
    "excise_poles",
    "get_scene",
    "load_scene",
    "sweep",
    "sweep_census",
    "validate_domain",
]
