"""coded_demixing URL Configuration

Results browsing and single-trial runs live under /v1/; the admin lists
persisted sweeps and threshold searches.
"""
from django.contrib import admin
from django.urls import include, path

urlpatterns = [
    path('admin/', admin.site.urls),

    path('v1/', include('coded_demixing.ura.urls')),
]

handler404 = 'coded_demixing.ura.response.handler404'
