import sys
from nurbsnav.cli import main
sys.exit(main())
