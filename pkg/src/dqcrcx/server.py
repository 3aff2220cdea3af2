import sys

from .config import get_executor, get_threads
from .tools import mcp


def main() -> None:
    try:
        get_threads()
        get_executor()
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(1)

    mcp.run()


if __name__ == "__main__":
    main()
