"""
Composite refactoring miner: clusters single refactoring operations into
composite refactorings and reports on them
"""
__version__ = "1.0.0"
