from .errors import ConvertError
from .planetoid import convert_planetoid
from .plotting import plot_results
from .webkb import convert_webkb

__all__ = ["ConvertError", "convert_planetoid", "convert_webkb",
           "plot_results"]
