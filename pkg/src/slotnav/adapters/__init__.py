"""Everything slotnav needs from outside its numerics.

The model, retrieval and navigation packages never import from here; the
composition root wires these into the commands.

Subpackages:
    * :mod:`.cli` - the ``slotnav`` rich-click group, one module per command,
      and the mapping from :class:`~slotnav.domain.errors.SlotnavError` kinds
      to exit codes.
    * :mod:`.config` - lib_layered_config loading of ``defaultconfig.d`` plus
      user files, ``--set`` overrides and the validated ``AppSettings`` tree.
    * :mod:`.logging` - lib_log_rich runtime set up from the ``[logging]``
      section; training progress and skipped generation records go here.
    * :mod:`.memory` - stand-ins used by ``build_testing`` that keep model
      defaults and logging in memory, so command numbers do not depend on
      files on the host.
"""

from __future__ import annotations

__all__: list[str] = []
