import logging

from rich.console import Console
from rich.logging import RichHandler

console = Console()


def setup_logging(verbose=False):
    """Route library logging through a rich handler on the shared console"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=verbose, show_path=verbose)],
        force=True,
    )
    # joblib workers are chatty at DEBUG
    logging.getLogger("joblib").setLevel(logging.WARNING)


def success(message):
    console.print(f"✅ {message}")


def warning(message):
    console.print(f"⚠️ {message}")


def error(message):
    console.print(f"❌ {message}", style="bold red")


def files_written(message):
    console.print(f"📁 {message}")
