"""civscan: static detection of compartment interface vulnerabilities
at a declared kernel/driver isolation boundary, over the MiniKer C subset."""

__version__ = "0.1.0"
