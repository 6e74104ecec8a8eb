import sys

from holotree.cli import main

sys.exit(main())
