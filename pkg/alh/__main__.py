import sys

from alh.cli import main

sys.exit(main())
