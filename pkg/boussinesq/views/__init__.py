from .run_list_create import RunListCreateAPI
from .run_detail import RunDetailAPI

__all__ = [
    "RunListCreateAPI",
    "RunDetailAPI",
]
