"""View-adaptive reachability labeling for workflow provenance.

The heavy lifting lives in the compiled extension. Grammars, views,
derivation logs and view labels cross the boundary in their JSON file
formats; data labels cross as encoded bytes.
"""

try:
    from ._provlab import (  # installed package layout
        Grammar,
        Run,
        ViewLabel,
        MismatchError,
        NotVisibleError,
        ProvlabError,
        generate_grammar,
        generate_run,
        generate_view,
    )
except ImportError:  # in-tree build with the bare module on sys.path
    from _provlab import (
        Grammar,
        Run,
        ViewLabel,
        MismatchError,
        NotVisibleError,
        ProvlabError,
        generate_grammar,
        generate_run,
        generate_view,
    )

__all__ = [
    "Grammar",
    "Run",
    "ViewLabel",
    "MismatchError",
    "NotVisibleError",
    "ProvlabError",
    "generate_grammar",
    "generate_run",
    "generate_view",
]
