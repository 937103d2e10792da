"""Figure scripts rendering oscbath CSV outputs.

Read-only consumers of the CSV schemas written by the ``oscbath`` CLI;
no physics is recomputed here.
"""

__version__ = "0.1.0"
