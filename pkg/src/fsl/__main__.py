import sys

from fsl.cli import main

sys.exit(main())
